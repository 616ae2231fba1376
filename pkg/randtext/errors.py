# randtext/errors.py
from typing import NamedTuple, Optional

from pydantic import ValidationError

EXIT_OK = 0
EXIT_COMPARISON_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3


class RandTextError(Exception):
    """Base class for every error the library raises on purpose."""

    exit_code = EXIT_USAGE


class DomainError(RandTextError, ValueError):
    """An argument lies outside the domain of a formula."""


class RankOverflowError(DomainError, OverflowError):
    """R_k does not fit in a signed 64-bit integer."""


class UnsupportedConfigurationError(RandTextError):
    """The closed forms assume equiprobable letters."""


class ConfigurationError(RandTextError):
    pass


class InsufficientDataError(RandTextError):
    pass


class UndefinedValueError(RandTextError):
    pass


class WordTooLongError(RandTextError):
    def __init__(self, length: int, cap: int):
        super().__init__(f"partial word reached {length} letters, over the cap of {cap}")
        self.length = length
        self.cap = cap


class OracleCostError(RandTextError):
    pass


class EmptyCorpusError(RandTextError):
    pass


class CorpusDecodeError(RandTextError):
    def __init__(self, byte_offset: int, reason: str):
        super().__init__(f"invalid UTF-8 at byte offset {byte_offset}: {reason}")
        self.byte_offset = byte_offset


class CannotInferError(RandTextError):
    pass


class StorageError(RandTextError):
    exit_code = EXIT_IO


class ErrorSummary(NamedTuple):
    exit_code: int
    summary: str


def describe_error(exc: BaseException) -> ErrorSummary:
    """
    Maps an exception to the exit code of the CLI and a one-line, human-readable summary.
    """
    if isinstance(exc, CorpusDecodeError):
        return ErrorSummary(exc.exit_code, f"Error de Decodificación: El corpus no es UTF-8 válido en el byte {exc.byte_offset} ({exc}).")
    if isinstance(exc, EmptyCorpusError):
        return ErrorSummary(exc.exit_code, f"Corpus Vacío: No quedan letras que analizar tras la normalización ({exc}).")
    if isinstance(exc, InsufficientDataError):
        return ErrorSummary(exc.exit_code, f"Datos Insuficientes: No hay datos suficientes para el cálculo pedido ({exc}).")
    if isinstance(exc, CannotInferError):
        return ErrorSummary(exc.exit_code, f"Parámetros Desconocidos: No se pudieron deducir m y q; indíquelos con -m y -q ({exc}).")
    if isinstance(exc, UnsupportedConfigurationError):
        return ErrorSummary(exc.exit_code, f"Configuración No Soportada: Las fórmulas cerradas suponen letras equiprobables ({exc}).")
    if isinstance(exc, ConfigurationError):
        return ErrorSummary(exc.exit_code, f"Error de Configuración: Revise config.yaml y las opciones de la línea de comandos ({exc}).")
    if isinstance(exc, StorageError):
        return ErrorSummary(exc.exit_code, f"Error de Almacenamiento: No se pudo guardar el resultado ({exc}).")
    if isinstance(exc, DomainError):
        return ErrorSummary(exc.exit_code, f"Parámetro Fuera de Dominio: {exc}.")
    if isinstance(exc, RandTextError):
        return ErrorSummary(exc.exit_code, f"Error ({type(exc).__name__}): {exc}.")
    if isinstance(exc, ValidationError):
        first: Optional[dict] = exc.errors()[0] if exc.errors() else None
        if first is not None:
            where = ".".join(str(part) for part in first.get("loc", ())) or "value"
            return ErrorSummary(EXIT_USAGE, f"Parámetro Inválido: El valor de '{where}' no es válido ({first.get('msg')}).")
        return ErrorSummary(EXIT_USAGE, f"Parámetros Inválidos: {exc}")
    if isinstance(exc, FileNotFoundError):
        return ErrorSummary(EXIT_IO, f"Error de Fichero: El fichero '{exc.filename}' no existe.")
    if isinstance(exc, OSError):
        return ErrorSummary(EXIT_IO, f"Error de E/S: {exc}.")
    if isinstance(exc, ValueError):
        return ErrorSummary(EXIT_USAGE, f"Valor Inválido: {exc}.")
    return ErrorSummary(
        EXIT_USAGE,
        f"Error Desconocido: El comando falló por una razón no identificada. Revise el log completo para más detalles ({exc}).",
    )
