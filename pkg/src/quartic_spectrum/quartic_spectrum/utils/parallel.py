from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List
import sys

from tqdm import tqdm
from loguru import logger


def parallel_map(fn: Callable, items: Iterable, threads: int = 1, desc: str = None, quiet: bool = False) -> List:
    '''
    Order-preserving map over independent work items. fn must be picklable when threads > 1.
    '''
    items = list(items)
    disable = quiet or not sys.stderr.isatty()
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in tqdm(items, desc=desc, disable=disable)]

    workers = min(threads, len(items))
    logger.debug(f'Mapping {len(items)} items over {workers} worker processes')
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(tqdm(executor.map(fn, items), total=len(items), desc=desc, disable=disable))
