"""
Run ledger kept in SQLite.

One RunTable row per completed run, keyed by run_id (SHA-256 of the
canonical config echo). The DataSet connection is a singleton, handed out
through a context manager that logs and re-raises database errors.
"""

from contextlib import contextmanager
from functools import lru_cache
from loguru import logger
from peewee import IntegrityError, OperationalError
from playhouse.dataset import DataSet
from nilbohr.logging_decorator import log_decorator as log

DB_FILE = "sqlite:///nilbohr.db"
PLACEHOLDER_RUN_ID = "<RUN_ID>"


@log
@lru_cache(maxsize=1)
def get_ledger_instance():
    """Singleton DataSet connection to the ledger."""
    return DataSet(DB_FILE)


@log
@contextmanager
def ledger_manager():
    """
    Yields the singleton DataSet instance.
    """
    db = get_ledger_instance()
    try:
        yield db
    except (OperationalError, IntegrityError) as error:
        logger.error("Ledger error: {}", error)
        raise


@log
def get_run_table(db):
    """
    :param db: DataSet instance
    :return: Table object for run records
    """
    return db["RunTable"]


@log
def initialize_ledger():
    """
    Creates RunTable with its columns and a unique index on run_id, using a
    schema-defining row that is removed again.

    :return: the run table
    """
    with ledger_manager() as db:
        runs = get_run_table(db)
        if "run_id" not in runs.columns:
            try:
                runs.insert(
                    run_id=PLACEHOLDER_RUN_ID,
                    command="<COMMAND>",
                    status=0,
                    found=False,
                    value="<VALUE>",
                    sets_examined=0,
                    wall_time=0.0,
                    timestamp="<TIMESTAMP>",
                    result_file="<RESULT_FILE>",
                )
                runs.create_index(["run_id"], unique=True)
            except IntegrityError as error:
                logger.warning("Failed to insert schema-defining run entry: {}", error)
            runs.delete(run_id=PLACEHOLDER_RUN_ID)
        logger.info("Run ledger ready")
        return runs


@log
def record_run(record, table=None):
    """
    Inserts a run row, or updates the row already holding its run_id.

    :param record: dict with run_id and the RunTable columns
    :return: True on success
    """
    with ledger_manager():
        runs = table if table is not None else initialize_ledger()
        run_id = record["run_id"]
        if runs.find_one(run_id=run_id) is not None:
            runs.update(columns=["run_id"], **record)
            logger.info("UPDATE SUCCESS: run {} updated", run_id[:12])
            return True
        runs.insert(**record)
        logger.info("ADD SUCCESS: run {} recorded", run_id[:12])
        return True


@log
def get_run(run_id, table=None):
    """
    :return: the row for run_id, or None
    """
    with ledger_manager():
        runs = table if table is not None else initialize_ledger()
        return runs.find_one(run_id=run_id)


@log
def list_runs(limit=20, table=None):
    """
    :return: the ``limit`` most recent rows, newest first
    """
    with ledger_manager():
        runs = table if table is not None else initialize_ledger()
        rows = sorted(runs.all(), key=lambda row: row["id"], reverse=True)
        return rows[:limit]


@log
def delete_run(run_id, table=None):
    with ledger_manager():
        runs = table if table is not None else initialize_ledger()
        if runs.find_one(run_id=run_id) is None:
            logger.info("DELETE FAILURE: run {} does not exist", run_id)
            return False
        runs.delete(run_id=run_id)
        logger.info("DELETE SUCCESS: run {} deleted", run_id)
        return True
