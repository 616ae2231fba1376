import pytest
from pydantic import ValidationError

from randtext.errors import (
    EXIT_IO,
    EXIT_USAGE,
    CannotInferError,
    CorpusDecodeError,
    DomainError,
    EmptyCorpusError,
    InsufficientDataError,
    StorageError,
    describe_error,
)
from randtext.schemas import ModelParams


@pytest.mark.parametrize("exc, exit_code, prefix", [
    (CorpusDecodeError(6, "invalid start byte"), EXIT_USAGE, "Error de Decodificación"),
    (EmptyCorpusError("no letters left after normalization"), EXIT_USAGE, "Corpus Vacío"),
    (InsufficientDataError("found 2"), EXIT_USAGE, "Datos Insuficientes"),
    (CannotInferError("separator frequency 0.0 is degenerate"), EXIT_USAGE, "Parámetros Desconocidos"),
    (DomainError("N must be >= 0, got -500"), EXIT_USAGE, "Parámetro Fuera de Dominio"),
    (StorageError("bucket refused"), EXIT_IO, "Error de Almacenamiento"),
    (FileNotFoundError(2, "No such file", "libro.txt"), EXIT_IO, "Error de Fichero"),
    (RuntimeError("boom"), EXIT_USAGE, "Error Desconocido"),
])
def test_describe_error(exc, exit_code, prefix):
    summary = describe_error(exc)
    assert summary.exit_code == exit_code
    assert summary.summary.startswith(prefix)


def test_summary_keeps_the_detail():
    summary = describe_error(CorpusDecodeError(6, "invalid start byte")).summary
    assert "byte 6" in summary
    assert "invalid start byte" in summary
    assert "libro.txt" in describe_error(FileNotFoundError(2, "No such file", "libro.txt")).summary


def test_validation_error_names_the_field():
    with pytest.raises(ValidationError) as excinfo:
        ModelParams(m=1, q=0.2)
    summary = describe_error(excinfo.value)
    assert summary.exit_code == EXIT_USAGE
    assert summary.summary.startswith("Parámetro Inválido: El valor de 'm'")
