# scripts/generate_fixtures.py
#!/usr/bin/env python3
"""
Script for writing the bundled fixture potentials and scattering data to fixtures/.
"""
import sys
from pathlib import Path

# Add src directory to Python path
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

from dnls_ist.core.fixtures import FIXTURES, write_fixtures
from dnls_ist.utils.logger import setup_logger

logger = setup_logger(__name__)


def main():
    """Main execution function."""
    print("=" * 60)
    print("DNLS IST - FIXTURE GENERATION")
    print("=" * 60)

    target = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent.parent / "fixtures"

    try:
        print(f"\nWriting {len(FIXTURES)} fixture(s) to {target}...")
        written = write_fixtures(target)
        for name, path in written.items():
            print(f"✓ {name}: {path.name}")

        print("\n" + "=" * 60)
        print("FIXTURES WRITTEN!")
        print("=" * 60)

    except Exception as e:
        logger.error(f"Fixture generation failed: {e}")
        print(f"\nERROR: Fixture generation failed - {e}")
        sys.exit(1)


if __name__ == "__main__":
    main()
