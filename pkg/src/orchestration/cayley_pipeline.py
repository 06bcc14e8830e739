import logging
import math
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Callable, Dict, List, Optional, Sequence

import pandas as pd

from src.arith.intervals import Real, to_fraction
from src.arith.number_theory import rho, rho_jacobi, rho_jacobi_bound
from src.densities.local_densities import DEFAULT_DELTA, DensityReporter, lower_bound_sum
from src.empirical.dyadic_equations import SCAN_COLUMNS, DyadicEquationScanner, DyadicTuple7
from src.enumeration.point_counter import NAIVE, TORSOR, PointCounter, iter_torsor_tuples
from src.geometry.cayley_surface import CayleyPoint
from src.geometry.torsor import PAIRS, decompose, decomposition_to_dict, verify_point, verify_tuple
from src.lattice.lattice_counter import (
    LatticeBoundChecker,
    PlaneBoxQuery,
    divisibility_lattice_det,
    divisibility_lattice_index_bruteforce,
)
from src.utils.logging_setup import setup_logger

SCAN_NOTE = "the limiting constant of N(B) / (B (log B)^6) is not determined at this scale"
MAX_REPORTED_FAILURES = 10


@dataclass
class StepResult:
    """What a pipeline step hands back: a JSON payload, a CSV table and any detected violations."""

    payload: Dict[str, Any]
    table: pd.DataFrame
    violations: int = 0
    notes: List[str] = field(default_factory=list)


class CayleyPipeline:
    def __init__(self, pipeline_name: str = "cayley", workers: Optional[int] = None,
                 oracle_limit: Optional[int] = None, torsor_limit: Optional[int] = None,
                 empirical_budget: Optional[int] = None, include_timing: bool = False):
        self.pipeline_name = pipeline_name
        self.include_timing = include_timing
        self.logger = self._setup_logger()
        self.pipeline_log = []

        # Initialize components
        self.counter = PointCounter(oracle_limit, torsor_limit, workers)
        self.bound_checker = LatticeBoundChecker(workers)
        self.reporter = DensityReporter(self.counter)
        self.scanner = DyadicEquationScanner(empirical_budget, workers)

    def _setup_logger(self) -> logging.Logger:
        return setup_logger(f"{__name__}.{self.pipeline_name}")

    def _log_pipeline_step(self, step: str, status: str, details: Dict = None):
        log_entry = {
            'timestamp': datetime.now(),
            'pipeline_name': self.pipeline_name,
            'step': step,
            'status': status,
            'details': details or {},
        }
        self.pipeline_log.append(log_entry)

        status_emoji = "✅" if status == "success" else "❌" if status == "error" else "⏳"
        self.logger.info(f"{status_emoji} {step}: {status} - {details}")

    def _run_step(self, step: str, details: Dict, work: Callable[[], StepResult]) -> StepResult:
        try:
            self._log_pipeline_step(step, "started", details)
            result = work()
            self._log_pipeline_step(step, "success", {"rows": len(result.table), "violations": result.violations})
            return result
        except Exception as e:
            self._log_pipeline_step(step, "error", {"error": str(e)})
            raise

    # -- counting ------------------------------------------------------------

    def count(self, max_b: Real, method: str = TORSOR, star: bool = False) -> StepResult:
        def work():
            report = self.counter.count(max_b, method, with_star=star)
            row = report.to_dict(self.include_timing)
            return StepResult(row, pd.DataFrame([row]))

        return self._run_step("count", {"max_b": str(max_b), "method": method, "star": star}, work)

    def scan(self, ladder: Sequence[Real], method: str = TORSOR) -> StepResult:
        def work():
            reports = self.reporter.ratio_report(ladder, method)
            rows = [r.to_dict(self.include_timing) for r in reports]
            by_height = sorted(reports, key=lambda r: r.B)
            monotone = all(a.N <= b.N for a, b in zip(by_height, by_height[1:]))
            positive = all(r.ratio > 0 for r in reports if r.N > 0)
            payload = {'method': method, 'rows': rows, 'non_decreasing': monotone, 'note': SCAN_NOTE}
            violations = int(not monotone) + int(not positive)
            return StepResult(payload, pd.DataFrame(rows), violations, [SCAN_NOTE])

        return self._run_step("scan", {"ladder": [str(B) for B in ladder], "method": method}, work)

    # -- torsor ----------------------------------------------------------------

    def decompose(self, coords: Sequence[int]) -> StepResult:
        def work():
            x = CayleyPoint.of(coords)
            sign, t = decompose(x)
            payload = {'x': list(x.as_tuple())}
            payload.update(decomposition_to_dict(sign, t))
            row = {f"x{i}": c for i, c in enumerate(x.as_tuple(), start=1)}
            row['sign'] = sign
            row.update({f"y{i}": y for i, y in enumerate(t.y, start=1)})
            row.update({f"z{i}{j}": t.z_(i, j) for i, j in PAIRS})
            return StepResult(payload, pd.DataFrame([row]))

        return self._run_step("decompose", {"x": list(coords)}, work)

    def verify(self, max_b: Real) -> StepResult:
        """Round trip and identity suite over every tuple, and every oracle point when the oracle can reach B."""

        def work():
            b = math.floor(to_fraction(max_b))
            failures = []
            tuples = 0
            for t in iter_torsor_tuples(self.counter.height_bound(max_b, TORSOR)):
                tuples += 1
                for label in verify_tuple(t):
                    failures.append({'kind': 'tuple', 'y': list(t.y), 'z': list(t.z), 'check': label})

            points = 0
            oracle_agrees = None
            if b <= self.counter.oracle_limit:
                for x in self.counter.iter_points(max_b, NAIVE):
                    points += 1
                    for label in verify_point(x):
                        failures.append({'kind': 'point', 'x': list(x.as_tuple()), 'check': label})
                oracle_agrees = self.counter.height_profile(max_b, NAIVE) == self.counter.height_profile(max_b, TORSOR)
                if not oracle_agrees:
                    failures.append({'kind': 'oracle', 'check': 'height_profile'})

            for failure in failures[:MAX_REPORTED_FAILURES]:
                self.logger.error(f"verification failure: {failure}")
            payload = {
                'max_b': b,
                'tuples_checked': tuples,
                'points_checked': points,
                'oracle_equivalence': oracle_agrees,
                'failures': len(failures),
                'failure_examples': failures[:MAX_REPORTED_FAILURES],
            }
            row = {k: payload[k] for k in ('max_b', 'tuples_checked', 'points_checked', 'oracle_equivalence', 'failures')}
            return StepResult(payload, pd.DataFrame([row]), len(failures))

        return self._run_step("verify", {"max_b": str(max_b)}, work)

    # -- densities and rho -------------------------------------------------------

    def densities(self, p_max: int, special_e: Optional[int] = None) -> StepResult:
        def work():
            table = self.reporter.density_table(p_max, special_e)
            mismatches = int((table['equal'] == 0).sum())
            records = table.astype(object).where(table.notna(), None).to_dict(orient='records')
            payload = {'p_max': p_max, 'special_e': special_e, 'rows': records, 'all_equal': mismatches == 0}
            return StepResult(payload, table, mismatches)

        return self._run_step("densities", {"p_max": p_max, "special_e": special_e}, work)

    @staticmethod
    def _rho_row(q: int, a: int, b: int) -> Dict:
        return {
            'q': q,
            'a': a,
            'b': b,
            'rho': rho(q, a, b),
            'rho_jacobi': rho_jacobi(q, a, b) if q % 2 else None,
            'bound': rho_jacobi_bound(q, a, b),
        }

    @staticmethod
    def _rho_failures(row: Dict) -> List[str]:
        q, a, b = row['q'], row['a'], row['b']
        failures = []
        if q % 2 and math.gcd(a * b, q) == 1 and row['rho'] != row['rho_jacobi']:
            failures.append('identity')
        if math.gcd(a, b) == 1 and math.gcd(a * b, q) == 1 and row['rho'] > row['bound']:
            failures.append('bound')
        return failures

    def rho(self, q: int, a: Optional[int] = None, b: Optional[int] = None, check: bool = False) -> StepResult:
        def work():
            if a is not None and b is not None:
                row = self._rho_row(q, a, b)
                failed = self._rho_failures(row) if check else []
                row['failures'] = ','.join(failed)
                return StepResult(dict(row), pd.DataFrame([row]), len(failed))
            if not check:
                raise ValueError("rho needs --a and --b, or --check to sweep every modulus up to q")
            return self._rho_sweep(q)

        return self._run_step("rho", {"q": q, "a": a, "b": b, "check": check}, work)

    def _rho_sweep(self, max_q: int) -> StepResult:
        identity_checked = bound_checked = 0
        failures = []
        for q in range(1, max_q + 1):
            for a in range(1, q + 1):
                for b in range(1, q + 1):
                    if math.gcd(a * b, q) != 1:
                        continue
                    row = self._rho_row(q, a, b)
                    identity_checked += q % 2
                    bound_checked += math.gcd(a, b) == 1
                    for label in self._rho_failures(row):
                        failures.append({'q': q, 'a': a, 'b': b, 'check': label})
        payload = {
            'max_q': max_q,
            'identity_checked': identity_checked,
            'bound_checked': bound_checked,
            'failures': len(failures),
            'failure_examples': failures[:MAX_REPORTED_FAILURES],
        }
        row = {k: payload[k] for k in ('max_q', 'identity_checked', 'bound_checked', 'failures')}
        return StepResult(payload, pd.DataFrame([row]), len(failures))

    # -- lattice bounds --------------------------------------------------------------

    def lemma6(self, trials: Optional[int] = None, seed: Optional[int] = None,
               v: Optional[Sequence[int]] = None, H: Optional[Sequence[Real]] = None) -> StepResult:
        def work():
            if v is not None:
                row = self.bound_checker.check_plane_query(PlaneBoxQuery(tuple(v), tuple(H)))
                row = {'v': list(row['v']), 'H': list(row['H']), 'count': row['count'], 'bound': row['bound']}
                violated = int(row['count'] > row['bound'])
                flat = {'v': ','.join(map(str, row['v'])), 'H': ','.join(row['H']),
                        'count': row['count'], 'bound': row['bound']}
                return StepResult(row, pd.DataFrame([flat]), violated)
            result = self.bound_checker.check_plane_bound(trials, seed)
            return self._bound_result(result)

        return self._run_step("lemma6", {"trials": trials, "seed": seed, "v": v, "H": H}, work)

    def lemma7(self, trials: int, seed: int) -> StepResult:
        def work():
            return self._bound_result(self.bound_checker.check_ellipse_bound(trials, seed))

        return self._run_step("lemma7", {"trials": trials, "seed": seed}, work)

    @staticmethod
    def _bound_result(result) -> StepResult:
        payload = result.to_dict()
        payload['violation_examples'] = result.violations[:MAX_REPORTED_FAILURES]
        over = [row for row in result.outside_domain if row['count'] > row['bound']]
        payload['outside_domain_examples'] = over[:MAX_REPORTED_FAILURES]
        return StepResult(payload, pd.DataFrame([result.to_dict()]), len(result.violations))

    def fixed_z(self, z: Sequence[int], heights: Sequence[Real]) -> StepResult:
        """Points with a fixed z-tuple next to their main term (B/P)(phi(P)/P)."""

        def work():
            table = self.reporter.fixed_z_report(z, heights)
            return StepResult({'z': list(z), 'rows': table.to_dict(orient='records')}, table)

        return self._run_step("fixed_z", {"z": list(z), "heights": [str(B) for B in heights]}, work)

    def lattice_det(self, moduli: Sequence[int], check: bool = False) -> StepResult:
        def work():
            det = divisibility_lattice_det(*moduli)
            payload = {'m': list(moduli), 'det': det}
            violations = 0
            if check:
                brute = divisibility_lattice_index_bruteforce(*moduli)
                payload['bruteforce'] = brute
                violations = int(brute != det)
            row = {f"m{i}": m for i, m in enumerate(moduli, start=1)}
            row.update({k: v for k, v in payload.items() if k != 'm'})
            return StepResult(payload, pd.DataFrame([row]), violations)

        return self._run_step("lattice_det", {"m": list(moduli), "check": check}, work)

    # -- dyadic equations and the lower bound -------------------------------------------

    def lemma34(self, which: int, K: Optional[DyadicTuple7] = None, trials: Optional[int] = None,
                seed: Optional[int] = None, budget: Optional[int] = None) -> StepResult:
        variant = f"N{which}"

        def work():
            if K is not None:
                table = self.scanner.count_rows(variant, K, budget)
                failures = self.scanner.verify(variant, K, budget)
                payload = table.iloc[0].to_dict()
                payload['verification_failures'] = len(failures)
                return StepResult(payload, table, len(failures))
            table = self.scanner.ratio_scan(variant, trials, seed, budget)
            payload = {
                'variant': variant,
                'trials': trials,
                'seed': seed,
                'budget': budget if budget is not None else self.scanner.budget,
                'max_ratio': float(table['ratio'].max()) if len(table) else None,
                'rows': table.to_dict(orient='records'),
            }
            return StepResult(payload, table.reindex(columns=SCAN_COLUMNS))

        details = {"variant": variant, "K": None if K is None else [str(k) for k in K.K],
                   "trials": trials, "seed": seed, "budget": budget}
        return self._run_step("lemma34", details, work)

    def lowerbound(self, B: Real, delta: Real = DEFAULT_DELTA) -> StepResult:
        def work():
            value = lower_bound_sum(B, delta)
            payload = {'B': float(to_fraction(B)), 'delta': str(to_fraction(delta)),
                       'value': float(value), 'exact': str(value)}
            return StepResult(payload, pd.DataFrame([payload]))

        return self._run_step("lowerbound", {"B": str(B), "delta": str(delta)}, work)

    # -- batches ----------------------------------------------------------------------

    def run_full_pipeline(self, pipeline_config: Dict[str, Dict]) -> Dict[str, bool]:
        """Run named jobs in order; each job names a step in 'type' plus that step's arguments."""
        results = {}

        self.logger.info(f"🚀 Starting full pipeline: {self.pipeline_name}")
        pipeline_start = datetime.now()

        try:
            for job_name, job_config in pipeline_config.items():
                self.logger.info(f"📋 Processing job: {job_name}")
                arguments = dict(job_config)
                job_type = arguments.pop('type', None)
                step = getattr(self, job_type, None) if job_type in JOB_TYPES else None

                if step is None:
                    self.logger.error(f"❌ Unknown job type: {job_type}")
                    success = False
                else:
                    try:
                        success = step(**arguments).violations == 0
                    except Exception as e:
                        self.logger.error(f"❌ Job {job_name} raised: {str(e)}")
                        success = False

                results[job_name] = success

                if not success:
                    self.logger.error(f"❌ Job {job_name} failed, stopping pipeline")
                    break

        finally:
            pipeline_duration = (datetime.now() - pipeline_start).total_seconds()
            successful_jobs = sum(1 for success in results.values() if success)

            self.logger.info(f"📊 Pipeline Summary:")
            self.logger.info(f"   Total Jobs: {len(results)}")
            self.logger.info(f"   Successful: {successful_jobs}")
            self.logger.info(f"   Failed: {len(results) - successful_jobs}")
            self.logger.info(f"   Duration: {pipeline_duration:.2f} seconds")

        return results

    def get_pipeline_summary(self) -> Dict[str, Any]:
        return {
            'pipeline_name': self.pipeline_name,
            'total_steps': len(self.pipeline_log),
            'pipeline_log': self.pipeline_log,
            'summary': {
                'successful_steps': sum(1 for log in self.pipeline_log if log['status'] == 'success'),
                'failed_steps': sum(1 for log in self.pipeline_log if log['status'] == 'error'),
                'start_time': self.pipeline_log[0]['timestamp'] if self.pipeline_log else None,
                'end_time': self.pipeline_log[-1]['timestamp'] if self.pipeline_log else None,
            },
        }


JOB_TYPES = (
    'count', 'scan', 'decompose', 'verify', 'densities', 'rho',
    'lemma6', 'lemma7', 'lemma34', 'lowerbound', 'lattice_det', 'fixed_z',
)
