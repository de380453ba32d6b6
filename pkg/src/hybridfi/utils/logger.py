import logging
import os
import sys
from typing import Any

from tabulate import tabulate
from termcolor import colored


class _ColorfulFormatter(logging.Formatter):
    def __init__(self, *args, **kwargs):
        self._root_name = kwargs.pop("root_name") + "."
        self._abbrev_name = kwargs.pop("abbrev_name", "")
        if len(self._abbrev_name):
            self._abbrev_name = self._abbrev_name + "."
        super().__init__(*args, **kwargs)

    def formatMessage(self, record):
        record.name = record.name.replace(self._root_name, self._abbrev_name)
        log = super().formatMessage(record)
        if record.levelno == logging.WARNING:
            prefix = colored("WARNING", "red", attrs=["blink"])
        elif record.levelno == logging.ERROR or record.levelno == logging.CRITICAL:
            prefix = colored("ERROR", "red", attrs=["blink", "underline"])
        else:
            return log
        return prefix + " " + log


def setup_logger(output: str | None = None, *, color: bool = True, name: str = "hybridfi", abbrev_name: str | None = None):
    """
    Initialize the hybridfi logger and set its verbosity level to "DEBUG".

    Args:
        output: a file name or a directory to save log. If None, will not save log file.
            If ends with ".txt" or ".log", assumed to be a file name.
            Otherwise, logs will be saved to `output/log.txt`.
        name: the root module name of this logger
        abbrev_name: an abbreviation of the module, to avoid long names in logs.
            Set to "" to not log the root module in logs.

    Handlers from an earlier call are closed and replaced, so every run logs
    only to its own output.

    Returns:
        logging.Logger: a logger
    """
    logger = logging.getLogger(name)
    logger.setLevel(logging.DEBUG)
    logger.propagate = False
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    if abbrev_name is None:
        abbrev_name = "hfi" if name == "hybridfi" else name

    plain_formatter = logging.Formatter(
        "[%(asctime)s] %(name)s %(levelname)s: %(message)s", datefmt="%m/%d %H:%M:%S"
    )
    ch = logging.StreamHandler(stream=sys.stdout)
    ch.setLevel(logging.INFO)
    if color:
        formatter = _ColorfulFormatter(
            colored("[%(asctime)s %(name)s]: ", "green") + "%(message)s",
            datefmt="%m/%d %H:%M:%S",
            root_name=name,
            abbrev_name=str(abbrev_name),
        )
    else:
        formatter = plain_formatter
    ch.setFormatter(formatter)
    logger.addHandler(ch)

    if output is not None:
        if output.endswith(".txt") or output.endswith(".log"):
            filename = output
        else:
            filename = os.path.join(output, "log.txt")
        os.makedirs(os.path.dirname(os.path.abspath(filename)), exist_ok=True)

        fh = logging.FileHandler(filename, mode="a", encoding="utf-8")
        fh.setLevel(logging.DEBUG)
        fh.setFormatter(plain_formatter)
        logger.addHandler(fh)

    return logger


def progress_enabled(logger: logging.Logger) -> bool:
    """tqdm bars are shown only when the logger would print INFO records."""
    return logger.isEnabledFor(logging.INFO) and bool(logging.getLogger("hybridfi").handlers)


def create_small_table(small_dict: dict[str, Any]) -> str:
    """
    Create a small table using the keys of small_dict as headers. This is only
    suitable for small dictionaries.

    Args:
        small_dict (dict): a result dictionary of only a few items.

    Returns:
        str: the table as a string.
    """
    keys, values = tuple(zip(*small_dict.items()))
    table = tabulate(
        [values],
        headers=keys,
        tablefmt="pipe",
        floatfmt=".4f",
        stralign="center",
        numalign="center",
    )
    return table


def create_rows_table(rows: list[dict[str, Any]], floatfmt: str = ".4f") -> str:
    """Render a list of homogeneous records (one per line) as a pipe table."""
    if not rows:
        return "(empty)"
    return tabulate(
        [list(r.values()) for r in rows],
        headers=list(rows[0].keys()),
        tablefmt="pipe",
        floatfmt=floatfmt,
    )
