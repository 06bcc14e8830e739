#!/usr/bin/env python3
"""
Quick Demo - counts, decomposes and checks a few things at desk scale
"""

import os
import sys
from pathlib import Path

# Add project root to Python path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))


def main():
    print("🚀 Cayley Cubic Point Counter - Quick Demo")
    print("=" * 50)

    from config.config import config
    from src.orchestration.cayley_pipeline import CayleyPipeline

    pipeline = CayleyPipeline("quick_demo")

    # Both engines at a small height
    print("\n🔢 Counting primitive points of U...")
    try:
        naive = pipeline.count(30, 'naive').payload
        torsor = pipeline.count(30, 'torsor', star=True).payload
        print(f"✅ N(30) naive:  {naive['N']}")
        print(f"✅ N(30) torsor: {torsor['N']}  N*(30): {torsor['Nstar']}")
    except Exception as e:
        print(f"❌ Counting failed: {e}")
        return False

    # The worked example
    print("\n🧩 Torsor coordinates of (2, 3, 6, -1)...")
    try:
        payload = pipeline.decompose([2, 3, 6, -1]).payload
        print(f"✅ y = {payload['y']}")
        print(f"✅ z = {payload['z']}")
    except Exception as e:
        print(f"❌ Decomposition failed: {e}")
        return False

    # A short batch of checks
    print("\n🧪 Running checks...")
    jobs = {
        'verify_small': {'type': 'verify', 'max_b': 20},
        'densities': {'type': 'densities', 'p_max': 13, 'special_e': 1},
        'plane_bound': {'type': 'lemma6', 'trials': 200, 'seed': 0},
        'ellipse_bound': {'type': 'lemma7', 'trials': 200, 'seed': 0},
        'lattice_det': {'type': 'lattice_det', 'moduli': [2, 3, 1, 6], 'check': True},
        'fixed_z': {'type': 'fixed_z', 'z': [1, 2, 1, 3, 1, 1], 'heights': [6, 36, 100]},
    }
    results = pipeline.run_full_pipeline(jobs)
    for job_name, success in results.items():
        print(f"{'✅' if success else '❌'} {job_name}")

    # Save a growth table
    print("\n💾 Saving growth table...")
    try:
        os.makedirs(config.OUTPUT_PATH, exist_ok=True)
        table = pipeline.scan([10, 30, 100]).table
        output_file = os.path.join(config.OUTPUT_PATH, 'growth_ratio.csv')
        table.to_csv(output_file, index=False, float_format='%.12g')
        print(f"✅ Saved: {output_file}")
    except Exception as e:
        print(f"❌ Save failed: {e}")
        return False

    print("\n🎉 Demo completed!")
    return len(results) == len(jobs) and all(results.values())


if __name__ == "__main__":
    success = main()
    if not success:
        sys.exit(1)
