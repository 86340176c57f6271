"""
Demo script for the cluster braiding verifier.
Walks through mutations, braid relations, the Kashaev matrix, the quantum
dilogarithm and octahedron volumes programmatically.
"""

import sys

import numpy as np


def demo_verifier():
    """Demonstrate the verifier layer by layer."""

    print("🔧 Cluster Braiding Verifier - Demo")
    print("=" * 60)

    try:
        from analytic import DilogParams, faddeev_phi, octahedron_volume, phi_zero
        from braid_classical import build_braid_matrix, evaluate_braid_word, parse_braid_word, verify_braid_relations
        from cluster_core import flip_exchange_matrix, generic_y_seed, mutate_y
        from config import configure_logging, load_settings
        from root_of_unity import build_RK, verify_rk
        from seed_loader import load_y_values

        configure_logging(load_settings().log_level)

        print("1. Mutating the flip quiver at its diagonal...")
        seed = mutate_y(generic_y_seed(flip_exchange_matrix()), 3)
        for k, value in enumerate(seed.y, 1):
            print(f"   y{k} -> {value}")

        print("\n2. Braiding operators on three strands:")
        B = build_braid_matrix(3)
        word = parse_braid_word("s1 s2 s1", 3)
        image = evaluate_braid_word(word, generic_y_seed(B))
        print(f"   s1 s2 s1 sends y4 to {image.y[3]}")
        report = verify_braid_relations(3, "y")
        print(f"   {'✅' if report.is_pass else '❌'} braid relations: {report.status.value}")

        print("\n3. Kashaev R-matrix at N=3:")
        RK = build_RK(3)
        print(f"   {RK.shape[0]}x{RK.shape[1]} matrix with {np.count_nonzero(np.abs(RK) > 1e-12)} nonzero entries")
        report = verify_rk(3, "cyclotomic")
        print(f"   {'✅' if report.is_pass else '❌'} exact braid relation: {report.status.value}")

        print("\n4. Quantum dilogarithm at b = 0.8 e^{i pi/8}:")
        p = DilogParams(0.8 * np.exp(1j * np.pi / 8))
        print(f"   Phi(0)        = {faddeev_phi(0, p):.10f}")
        print(f"   closed form   = {phi_zero(p):.10f}")
        print(f"   Phi(0.3+0.1i) = {faddeev_phi(0.3 + 0.1j, p):.10f}")

        print("\n5. Octahedron volume of a sample y-tuple:")
        if len(sys.argv) > 1:
            y = load_y_values(sys.argv[1])
        else:
            y = [0.9 + 0.4j, 1.1 - 0.2j, 0.7 + 0.6j, -0.5 + 0.8j, 1.3 + 0.1j, 0.6 - 0.5j, 1.2 + 0.3j]
        print(f"   signed volume = {octahedron_volume(y):.12f}")

        print("\n" + "=" * 60)
        print("🎉 Demo completed!")

    except ImportError as e:
        print(f"❌ Import error: {e}")
        print("Make sure all dependencies are installed: pip install -r requirements.txt")
    except Exception as e:
        print(f"❌ Demo failed: {e}")


def show_usage_examples():
    """Show command-line usage examples."""
    print("""
📚 Command-line examples:

   python main_verifier.py cluster mutate --input seed.json --ks 1,3
   python main_verifier.py braid eval --n 3 --word "s1 s2 s1" --mode y
   python main_verifier.py braid verify --n 3 --mode y --pretty
   python main_verifier.py qtorus verify-rq --n 2 --N 5 --mode complex --seed 42
   python main_verifier.py opcalc replay --pretty
   python main_verifier.py rk build --N 5 --out rk.json
   python main_verifier.py rk braid-check --N 5 --mode complex
   python main_verifier.py rk limit --N 3 --deltas 1e-1,1e-2,1e-3 --k2 0.4 --k6 0.3
   python main_verifier.py phi eval --z 0.3+0.1i --b 0.7+0.2i
   python main_verifier.py volume octa --y y.json
   python main_verifier.py checkall --level fast --pretty
""")


if __name__ == "__main__":
    if len(sys.argv) > 1 and sys.argv[1] == "--examples":
        show_usage_examples()
    else:
        demo_verifier()
