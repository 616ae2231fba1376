# randtext/storage.py
import abc
import os
import shutil
from typing import Optional

import boto3
from botocore.client import Config
from botocore.exceptions import BotoCoreError, ClientError

from .errors import StorageError
from .logger import get_logger
from .schemas import Settings

logger = get_logger(__name__)


class StorageProvider(abc.ABC):
    @abc.abstractmethod
    def save(self, source_path: str, destination_path: str) -> str:
        """Moves a finished local file to its destination and returns its location."""

    @abc.abstractmethod
    def location(self, destination_path: str) -> str:
        pass


class LocalStorage(StorageProvider):
    def __init__(self, base_path: str):
        self.base_path = base_path
        os.makedirs(self.base_path, exist_ok=True)

    def save(self, source_path: str, destination_path: str) -> str:
        final_destination = self.location(destination_path)
        parent = os.path.dirname(final_destination)
        if parent:
            os.makedirs(parent, exist_ok=True)
        shutil.move(source_path, final_destination)
        return final_destination

    def location(self, destination_path: str) -> str:
        return os.path.join(self.base_path, destination_path)


class S3Storage(StorageProvider):
    def __init__(self, bucket: str, endpoint_url: Optional[str] = None,
                 access_key: Optional[str] = None, secret_key: Optional[str] = None,
                 prefix: str = ""):
        self.bucket = bucket
        self.prefix = prefix.strip("/")
        self.s3_client = boto3.client(
            's3',
            endpoint_url=endpoint_url,
            aws_access_key_id=access_key,
            aws_secret_access_key=secret_key,
            config=Config(signature_version='s3v4')
        )
        self._create_bucket_if_not_exists()

    def _create_bucket_if_not_exists(self):
        try:
            self.s3_client.head_bucket(Bucket=self.bucket)
        except ClientError as e:
            if e.response['Error']['Code'] == '404':
                self.s3_client.create_bucket(Bucket=self.bucket)
            else:
                raise StorageError(f"cannot access bucket '{self.bucket}': {e}") from e

    def _key(self, destination_path: str) -> str:
        return f"{self.prefix}/{destination_path}" if self.prefix else destination_path

    def save(self, source_path: str, destination_path: str) -> str:
        key = self._key(destination_path)
        try:
            self.s3_client.upload_file(source_path, self.bucket, key)
        except (BotoCoreError, ClientError) as e:
            logger.error(f"Failed to upload {source_path} to s3://{self.bucket}/{key}: {e}")
            raise StorageError(f"upload of {destination_path} failed: {e}") from e
        finally:
            if os.path.exists(source_path):
                os.remove(source_path)
        return self.location(destination_path)

    def location(self, destination_path: str) -> str:
        return f"s3://{self.bucket}/{self._key(destination_path)}"


_storage_provider: Optional[StorageProvider] = None


def initialize_storage_provider(settings: Settings, output_dir: Optional[str] = None) -> StorageProvider:
    global _storage_provider
    output_dir = output_dir or settings.global_.output_dir
    storage_config = settings.storage
    if storage_config.type == 's3':
        s3 = storage_config.s3
        _storage_provider = S3Storage(
            bucket=s3.bucket,
            endpoint_url=s3.endpoint_url,
            access_key=s3.access_key,
            secret_key=s3.secret_key,
            prefix=output_dir,
        )
    else:
        _storage_provider = LocalStorage(base_path=output_dir)
    logger.debug(f"Storage provider initialized: {storage_config.type} ({output_dir})")
    return _storage_provider


def get_storage_provider() -> StorageProvider:
    if _storage_provider is None:
        raise RuntimeError("Storage provider has not been initialized.")
    return _storage_provider


def reset_storage_provider() -> None:
    global _storage_provider
    _storage_provider = None
