import sys
import pathlib

from loguru import logger

_format = ("<green>{time:HH:mm:ss.SSS}</green> - <cyan>{name}</cyan> - <level>{level}</level> - "
           "<level>{message}</level> ({file}:{line})")


def setup_logger(level: str = 'INFO', filename: str = None, file_level: str = 'DEBUG'):
    '''
    Replaces loguru's default sink with a colorized stderr sink and, optionally, a file under logs/.
    '''
    logger.remove()
    logger.add(sys.stderr, level=level, format=_format, colorize=sys.stderr.isatty())

    if filename is not None:
        log_dir = pathlib.Path('logs')
        log_dir.mkdir(parents=True, exist_ok=True)
        logger.add(str(log_dir.joinpath(filename)), level=file_level, format=_format, colorize=False)

    return logger
