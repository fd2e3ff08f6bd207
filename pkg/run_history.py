import json
import logging
import os
import sqlite3
from datetime import datetime, timedelta
from typing import Any, Dict, List, Optional

import pandas as pd

logger = logging.getLogger(__name__)

TIMESTAMP_FORMAT = "%Y-%m-%d %H:%M:%S"


class RunHistoryManager:
    """Keeps a ledger of CLI runs: command, parameters, outputs, exit code and timing."""

    def __init__(self, db_path: str = "cavphase_runs.db"):
        self.db_path = db_path
        self.init_database()

    def init_database(self):
        """Create the run_history table and its indexes."""
        try:
            with sqlite3.connect(self.db_path) as conn:
                cursor = conn.cursor()

                cursor.execute("""
                    CREATE TABLE IF NOT EXISTS run_history (
                        record_id INTEGER PRIMARY KEY AUTOINCREMENT,
                        timestamp DATETIME NOT NULL,
                        command TEXT NOT NULL,
                        parameters TEXT,   -- JSON object
                        outputs TEXT,      -- JSON list of paths
                        exit_code INTEGER NOT NULL,
                        duration_s REAL,
                        diagnostics TEXT
                    )
                """)

                cursor.execute("CREATE INDEX IF NOT EXISTS idx_run_timestamp ON run_history(timestamp)")
                cursor.execute("CREATE INDEX IF NOT EXISTS idx_run_command ON run_history(command)")

                conn.commit()
                logger.debug("Run history database ready at %s", self.db_path)

        except sqlite3.Error as e:
            logger.error("Error initializing run history database %s: %s", self.db_path, e)

    def log_run(self, command: str, parameters: Dict[str, Any], outputs: List[str], exit_code: int,
                duration_s: float, diagnostics: str = "") -> int:
        """Record one run. Returns the record id, or -1 if the ledger could not be written."""
        try:
            with sqlite3.connect(self.db_path) as conn:
                cursor = conn.cursor()

                cursor.execute("""
                    INSERT INTO run_history
                    (timestamp, command, parameters, outputs, exit_code, duration_s, diagnostics)
                    VALUES (?, ?, ?, ?, ?, ?, ?)
                """, (
                    datetime.now().strftime(TIMESTAMP_FORMAT),
                    command,
                    json.dumps(parameters, sort_keys=True, default=str),
                    json.dumps(outputs),
                    exit_code,
                    duration_s,
                    diagnostics,
                ))

                record_id = cursor.lastrowid
                conn.commit()

                logger.debug("Run logged with ID %s", record_id)
                return record_id

        except sqlite3.Error as e:
            logger.error("Error logging run: %s", e)
            return -1

    def get_run_history(self, limit: int = 50, offset: int = 0, command_filter: Optional[str] = None,
                        date_from: Optional[datetime] = None, date_to: Optional[datetime] = None) -> List[Dict]:
        """Runs in reverse chronological order with optional filters."""
        try:
            with sqlite3.connect(self.db_path) as conn:
                conn.row_factory = sqlite3.Row
                cursor = conn.cursor()

                query = "SELECT * FROM run_history WHERE 1=1"
                params: List[Any] = []

                if command_filter:
                    query += " AND command = ?"
                    params.append(command_filter)

                if date_from:
                    query += " AND timestamp >= ?"
                    params.append(date_from.strftime(TIMESTAMP_FORMAT))

                if date_to:
                    query += " AND timestamp <= ?"
                    params.append(date_to.strftime(TIMESTAMP_FORMAT))

                query += " ORDER BY record_id DESC LIMIT ? OFFSET ?"
                params.extend([limit, offset])

                cursor.execute(query, params)

                history = []
                for row in cursor.fetchall():
                    record = dict(row)
                    for key, empty in (("parameters", "{}"), ("outputs", "[]")):
                        try:
                            record[key] = json.loads(record[key] or empty)
                        except json.JSONDecodeError:
                            record[key] = json.loads(empty)
                    history.append(record)

                return history

        except sqlite3.Error as e:
            logger.error("Error retrieving run history: %s", e)
            return []

    def export_to_csv(self, filename: Optional[str] = None, **filters) -> Optional[str]:
        """Write the run history to CSV. Returns the file name, or None when there is nothing to export."""
        if filename is None:
            filename = f"run_history_{datetime.now().strftime('%Y%m%d_%H%M%S')}.csv"

        history = self.get_run_history(limit=100000, **filters)
        if not history:
            return None

        rows = [{
            "record_id": record["record_id"],
            "timestamp": record["timestamp"],
            "command": record["command"],
            "parameters": json.dumps(record["parameters"], sort_keys=True),
            "outputs": ";".join(record["outputs"]),
            "exit_code": record["exit_code"],
            "duration_s": record["duration_s"],
            "diagnostics": record["diagnostics"] or "",
        } for record in history]

        pd.DataFrame(rows).to_csv(filename, index=False, lineterminator="\n")
        return filename

    def get_statistics(self) -> Dict:
        """Total runs, failures, per-command counts and runs in the last 7 days."""
        try:
            with sqlite3.connect(self.db_path) as conn:
                cursor = conn.cursor()

                cursor.execute("SELECT COUNT(*) FROM run_history")
                total_runs = cursor.fetchone()[0]

                cursor.execute("SELECT COUNT(*) FROM run_history WHERE exit_code != 0")
                failed_runs = cursor.fetchone()[0]

                cursor.execute("SELECT command, COUNT(*) FROM run_history GROUP BY command ORDER BY command")
                per_command = {command: count for command, count in cursor.fetchall()}

                seven_days_ago = (datetime.now() - timedelta(days=7)).strftime(TIMESTAMP_FORMAT)
                cursor.execute("SELECT COUNT(*) FROM run_history WHERE timestamp >= ?", (seven_days_ago,))
                recent_runs = cursor.fetchone()[0]

                return {
                    "total_runs": total_runs,
                    "failed_runs": failed_runs,
                    "per_command": per_command,
                    "recent_runs": recent_runs,
                }

        except sqlite3.Error as e:
            logger.error("Error getting run statistics: %s", e)
            return {}

    def clear_history(self, days_to_keep: Optional[int] = None) -> int:
        """Delete runs, or only those older than days_to_keep. Returns the number removed."""
        try:
            with sqlite3.connect(self.db_path) as conn:
                cursor = conn.cursor()

                if days_to_keep is not None:
                    cutoff = (datetime.now() - timedelta(days=days_to_keep)).strftime(TIMESTAMP_FORMAT)
                    cursor.execute("DELETE FROM run_history WHERE timestamp < ?", (cutoff,))
                else:
                    cursor.execute("DELETE FROM run_history")

                deleted = cursor.rowcount
                conn.commit()

                logger.info("Cleared %d run history records", deleted)
                return deleted

        except sqlite3.Error as e:
            logger.error("Error clearing run history: %s", e)
            return 0


_managers: Dict[str, RunHistoryManager] = {}


def get_history_manager(db_path: Optional[str] = None) -> Optional[RunHistoryManager]:
    """Ledger for db_path or CAVPHASE_HISTORY_DB; None when neither is set."""
    path = db_path or os.getenv("CAVPHASE_HISTORY_DB")
    if not path:
        return None
    if path not in _managers:
        _managers[path] = RunHistoryManager(db_path=path)
    return _managers[path]
