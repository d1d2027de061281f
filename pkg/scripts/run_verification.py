# scripts/run_verification.py
#!/usr/bin/env python3
"""
Script for running the verification suites and printing a summary.

Usage:
    python scripts/run_verification.py                 # all suites
    python scripts/run_verification.py delta pc-model  # selected suites
"""
import sys
from pathlib import Path

# Add src directory to Python path
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

from dnls_ist.core.pipeline import IstPipeline
from dnls_ist.core.verification import SUITES
from dnls_ist.utils.logger import setup_logger

logger = setup_logger(__name__)


def print_report(report) -> None:
    """Print one suite with a line per check."""
    status = "✓" if report.passed else "✗"
    print(f"\n{status} {report.suite} ({report.elapsed:.1f}s)")
    print("-" * 40)
    for check in report.checks:
        mark = "✓" if check.passed else "✗"
        print(f"  {mark} {check.name}: measured {check.measured:.3e} "
              f"(target {check.target:.3e}, tolerance {check.tolerance:.3e})")
        if check.detail and not check.passed:
            print(f"      {check.detail}")


def main():
    """Main execution function."""
    print("=" * 60)
    print("DNLS IST - VERIFICATION")
    print("=" * 60)

    names = sys.argv[1:] or list(SUITES)
    unknown = [name for name in names if name not in SUITES]
    if unknown:
        print(f"✗ Unknown suite(s): {', '.join(unknown)}")
        print(f"  Available: {', '.join(SUITES)}")
        sys.exit(2)

    try:
        print("\n1. Initializing pipeline...")
        pipeline = IstPipeline()

        print(f"\n2. Running {len(names)} suite(s)...")
        reports = pipeline.verify(names)
        for report in reports:
            print_report(report)

        failed = [r.suite for r in reports if not r.passed]
        print("\n" + "=" * 60)
        if failed:
            print(f"VERIFICATION FAILED: {', '.join(failed)}")
            print("=" * 60)
            sys.exit(1)
        print("ALL SUITES PASSED!")
        print("=" * 60)

    except Exception as e:
        logger.error(f"Verification run failed: {e}")
        print(f"\nERROR: Verification run failed - {e}")
        sys.exit(1)


if __name__ == "__main__":
    main()
