"""
End-to-end test for the cluster braiding verifier.
Creates the sample inputs and runs the complete command-line workflow on them.
"""

import json
import os
import shutil
import sys
import tempfile

# Add current directory to path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from main_verifier import EXIT_OK, EXIT_USAGE, dispatch
from seed_loader import create_sample_files, load_seed, load_y_values


def test_verifier_workflow():
    """Run every layer of the verifier on the sample files."""

    print("🔧 TESTING THE CLUSTER BRAIDING VERIFIER END TO END")
    print("=" * 70)

    sample_dir = tempfile.mkdtemp(prefix="verifier_samples_")
    try:
        print("📊 Creating sample inputs...")
        paths = create_sample_files(sample_dir)
        seed = load_seed(paths["seed"])
        values = load_y_values(paths["y"])
        assert seed.size == 10
        assert len(values) == 7
        print(f"✅ Sample seed ({seed.size} variables) and {len(values)} y-values created")

        matrix_path = os.path.join(sample_dir, "rk.json")
        test_cases = [
            {
                "argv": ["cluster", "mutate", "--input", paths["seed"], "--ks", "2,2"],
                "expected": EXIT_OK,
                "description": "Double mutation of the braid seed",
            },
            {
                "argv": ["braid", "eval", "--n", "3", "--word", "s1 s2 s1", "--seed", paths["seed"]],
                "expected": EXIT_OK,
                "description": "Braid word on the sample seed",
            },
            {
                "argv": ["braid", "verify", "--n", "3", "--mode", "x", "--definition"],
                "expected": EXIT_OK,
                "description": "Braid relations and the mutation-word definition",
            },
            {
                "argv": ["qtorus", "heisenberg", "--n", "3"],
                "expected": EXIT_OK,
                "description": "Heisenberg realisation of the quantum torus",
            },
            {
                "argv": ["rk", "build", "--N", "3", "--mode", "cyclotomic", "--out", matrix_path],
                "expected": EXIT_OK,
                "description": "Exact Kashaev matrix written to disk",
            },
            {
                "argv": ["rk", "braid-check", "--N", "3", "--input", matrix_path],
                "expected": EXIT_OK,
                "description": "Braid relation of the stored matrix",
            },
            {
                "argv": ["phi", "check"],
                "expected": EXIT_OK,
                "description": "Shift and inversion relations of Phi",
            },
            {
                "argv": ["volume", "octa", "--y", paths["y"], "--i", "1"],
                "expected": EXIT_OK,
                "description": "Octahedron volume of the sample y-values",
            },
            {
                "argv": ["volume", "flip", "--y", paths["y"]],
                "expected": EXIT_USAGE,
                "description": "Flip check rejects a 7-value tuple",
            },
            {
                "argv": ["braid", "eval", "--n", "4", "--word", "s1", "--seed", paths["seed"]],
                "expected": EXIT_USAGE,
                "description": "Strand count mismatch with the seed",
            },
        ]

        print("\n🧪 RUNNING COMMANDS")
        print("-" * 50)

        for i, case in enumerate(test_cases, 1):
            print(f"\n{i}. Testing: {case['description']}")
            print(f"   Command: {' '.join(case['argv'])}")
            code = dispatch(case["argv"])
            assert code == case["expected"], f"{case['description']}: exit {code}, expected {case['expected']}"
            print(f"   ✅ PASS - exit code {code}")

        with open(matrix_path, encoding="utf-8") as handle:
            stored = json.load(handle)
        assert stored["dim"] == 9

        print("\n🎯 TESTING SUMMARY")
        print("=" * 50)
        print("✅ Seeds, braid words and exact R-matrices round-trip through files")
        print("✅ Invalid inputs map to the usage exit code")

    finally:
        shutil.rmtree(sample_dir, ignore_errors=True)
        print(f"\n🧹 Cleaned up sample directory: {sample_dir}")


def main():
    """Run the complete test."""
    test_verifier_workflow()
    print("\n🎉 ALL TESTS COMPLETED!")
    print("=" * 70)


if __name__ == "__main__":
    main()
