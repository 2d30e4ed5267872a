"""A collection of auxiliary functions for working with files and directories."""
import csv
import gzip
import io
import json
import logging
import os

logger = logging.getLogger(__name__)


def preparedir(target_dir):
    """Prepare a folder for writing results.

    This method creates the folder if it is not created. Files already in the
    folder are kept.
    """
    if os.path.isdir(target_dir):
        return True
    try:
        os.makedirs(target_dir)
        return True
    except Exception as e:
        logger.error('Failed to create folder: %s\n%s', target_dir, e)
        return False


def ensure_parent(file_path):
    """Create the parent folder of a file path if it doesn't exist."""
    folder = os.path.dirname(os.path.abspath(file_path))
    if not os.path.isdir(folder):
        preparedir(folder)
    return file_path


def is_gzip(file_path):
    """Check the magic number of a file for gzip compression."""
    with open(file_path, 'rb') as inf:
        return inf.read(2) == b'\x1f\x8b'


def open_text(file_path, mode='r', compress=None):
    """Open a text file that may be gzip compressed.

    Args:
        file_path: Path to file.
        mode: 'r' or 'w'.
        compress: Write with gzip. If None, files ending with .gz are compressed.
            Compression is detected from the content when reading.
    """
    if mode.startswith('r'):
        if is_gzip(file_path):
            return gzip.open(file_path, 'rt', encoding='utf-8', newline='\n')
        return open(file_path, 'r', encoding='utf-8', newline='\n')

    ensure_parent(file_path)
    if compress is None:
        compress = str(file_path).endswith('.gz')
    if compress:
        # mtime=0 keeps the compressed bytes identical between runs
        raw = gzip.GzipFile(file_path, 'wb', mtime=0)
        return io.TextIOWrapper(raw, encoding='utf-8', newline='\n')
    return open(file_path, 'w', encoding='utf-8', newline='\n')


def write_to_file(file_path, data, mkdir=False):
    """Write a string of data to file.

    Args:
        file_path: Full path for a valid file path (e.g. /tmp/report/summary.json)
        data: Any data as string
        mkdir: Set to True to create the directory if doesn't exist (Default: False)
    """
    folder = os.path.dirname(os.path.abspath(file_path))
    if mkdir:
        preparedir(folder)

    if not os.path.isdir(folder):
        raise ValueError('Failed to find %s.' % folder)

    with open(file_path, 'w', encoding='utf-8', newline='\n') as outf:
        try:
            outf.write(str(data))
        except Exception as e:
            raise IOError('Failed to write %s to file:\n\t%s' % (file_path, str(e)))
    return file_path


def write_json(file_path, data, mkdir=True):
    """Write a dictionary to a json file with sorted keys."""
    return write_to_file(file_path, json.dumps(data, indent=2, sort_keys=True) + '\n',
                         mkdir)


def read_json(file_path):
    """Load a json file."""
    with open(file_path, 'r', encoding='utf-8') as inf:
        return json.load(inf)


def write_csv(file_path, header, rows, mkdir=True):
    """Write rows to a csv file.

    Args:
        file_path: Path to csv file.
        header: List of column names.
        rows: Iterable of sequences with the same length as header.
    """
    if mkdir:
        ensure_parent(file_path)
    with open(file_path, 'w', encoding='utf-8', newline='') as outf:
        writer = csv.writer(outf, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
    logger.info('Wrote %s', file_path)
    return file_path


def read_csv(file_path):
    """Read a csv file into a header and a list of rows."""
    with open(file_path, 'r', encoding='utf-8', newline='') as inf:
        reader = csv.reader(inf)
        header = next(reader)
        return header, [row for row in reader]
