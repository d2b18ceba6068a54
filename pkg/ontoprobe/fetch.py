"""
Fetch module for Ontoprobe
Downloads published ontology files and unpacks zip archives
"""
import io
import zipfile
from pathlib import Path, PurePosixPath
from typing import List, Optional, Union
from urllib.parse import urlparse

import requests
from loguru import logger

from ontoprobe import config
from ontoprobe.errors import FetchError

REQUEST_TIMEOUT_S = 60


def _safe_member(name: str) -> bool:
    path = PurePosixPath(name)
    return not path.is_absolute() and ".." not in path.parts


def fetch_ontology(url: Optional[str], dest: Union[str, Path], session: Optional[requests.Session] = None) -> List[Path]:
    """
    Download `url` into `dest`.

    Zip archives are unpacked (members escaping `dest` are skipped); any other
    payload is stored under the last URL path segment.

    Returns:
        List[Path]: the files written
    """
    url = url or config.FETCH_URL
    if not url:
        raise FetchError("no URL given and ONTOPROBE_FETCH_URL is not set")
    dest = Path(dest)
    http = session or requests
    try:
        response = http.get(url, timeout=REQUEST_TIMEOUT_S)
    except requests.RequestException as e:
        raise FetchError(f"cannot download {url}: {e}") from e
    if response.status_code != 200:
        raise FetchError(f"download of {url} failed with HTTP {response.status_code}")
    payload = response.content
    logger.info(f"Downloaded {len(payload)} bytes from {url}")

    dest.mkdir(parents=True, exist_ok=True)
    written: List[Path] = []
    if zipfile.is_zipfile(io.BytesIO(payload)):
        with zipfile.ZipFile(io.BytesIO(payload)) as archive:
            for member in archive.infolist():
                if member.is_dir():
                    continue
                if not _safe_member(member.filename):
                    logger.warning(f"Skipping archive member outside the destination: {member.filename}")
                    continue
                target = dest / member.filename
                target.parent.mkdir(parents=True, exist_ok=True)
                target.write_bytes(archive.read(member))
                written.append(target)
    else:
        name = PurePosixPath(urlparse(url).path).name or "download"
        target = dest / name
        target.write_bytes(payload)
        written.append(target)
    logger.success(f"Stored {len(written)} files in {dest}")
    return written
