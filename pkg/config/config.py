import logging
import os
from dotenv import load_dotenv

load_dotenv()

class Config:
    # Enumeration limits
    ORACLE_LIMIT = int(os.getenv('CAYLEY_ORACLE_LIMIT', '300'))
    TORSOR_LIMIT = int(os.getenv('CAYLEY_TORSOR_LIMIT', '100000'))

    # Budgets for the lattice and dyadic counters
    CELL_BUDGET = int(os.getenv('CAYLEY_CELL_BUDGET', str(10 ** 8)))
    EMPIRICAL_BUDGET = int(os.getenv('CAYLEY_EMPIRICAL_BUDGET', str(10 ** 7)))
    DENSITY_PRIME_LIMIT = int(os.getenv('CAYLEY_DENSITY_PRIME_LIMIT', '31'))

    # Execution
    # 0 means one worker per core
    WORKERS = int(os.getenv('CAYLEY_WORKERS', '0')) or os.cpu_count() or 1
    LOG_LEVEL = os.getenv('CAYLEY_LOG_LEVEL', 'INFO').upper()

    # Output Paths
    OUTPUT_PATH = os.getenv(
        'CAYLEY_OUTPUT_PATH',
        os.path.join(os.path.dirname(__file__), '..', 'data', 'output')
    )

    @property
    def LOG_LEVEL_NUMBER(self):
        return getattr(logging, self.LOG_LEVEL, logging.INFO)

config = Config()
