"""
Artifact file handling

Inputs are opened as UTF-8 text with a clear error for missing paths;
outputs are written to a temporary file next to the target and moved into
place only once complete, so a failed command never leaves a partial file.
"""

import logging
import os
import tempfile
from contextlib import contextmanager

logger = logging.getLogger(__name__)


def open_input(path):
    """
    Open an input file for reading

    Args:
        path: File path

    Returns:
        Text stream (UTF-8)
    """
    if not os.path.isfile(path):
        raise FileNotFoundError(f"file not found: {path}")
    return open(path, encoding='utf-8', newline='')


@contextmanager
def atomic_write(path, binary=False):
    """
    Write a file all-or-nothing

    Args:
        path: Target path
        binary: Yield a bytes stream instead of a text stream

    Yields:
        Writable stream; the target appears only if the block completes
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, temp_path = tempfile.mkstemp(prefix='.tmp-', dir=directory)
    try:
        if binary:
            stream = os.fdopen(fd, 'wb')
        else:
            stream = os.fdopen(fd, 'w', encoding='utf-8', newline='')
        with stream:
            yield stream
        os.replace(temp_path, path)
        logger.debug('Wrote %s', path)
    except BaseException:
        if os.path.exists(temp_path):
            os.remove(temp_path)
        raise
