"""
Performance benchmarks for alphaeta lab.

Times the standard desk-scale workloads and records their headline numbers.
"""

import time
from pathlib import Path
import json

import numpy as np

from alphaeta_lab.adversary import (
    WedgePolicy,
    eve_ciphertext_only_ber,
    gamma_empirical,
    run_bruteforce_trial,
    run_correlation_trial,
)
from alphaeta_lab.constellation import SystemParams
from alphaeta_lab.dsr import dsr_scaling_experiment
from alphaeta_lab.jointattack import pe_vs_n
from alphaeta_lab.keystream import FilteredLfsrExpander, LfsrExpander, LfsrSpec
from alphaeta_lab.receiver import roundtrip_ber
from alphaeta_lab.seeding import derive_rng


def bench_gamma():
    params = SystemParams(2000, 40000)
    est = gamma_empirical(params, WedgePolicy.paper_default(), 10000, derive_rng(0, "bench-gamma"))
    return {"gamma_empirical": round(est.mean, 4)}


def bench_separation():
    params = SystemParams(2048, 40000)
    bob = roundtrip_ber(params, LfsrSpec.primitive(16), 1000000, derive_rng(0, "bench-bob"))
    eve = eve_ciphertext_only_ber(
        SystemParams(2000, 40000), "nearest_index", 100000, derive_rng(0, "bench-eve")
    )
    return {"bob_errors": bob.errors, "eve_ber": round(eve.ber, 4)}


def bench_bruteforce():
    params = SystemParams(16, 25)
    spec = LfsrSpec.primitive(16)
    rng = derive_rng(0, "bench-bruteforce")
    policy = WedgePolicy.confidence_level(0.9999)
    kept = sum(
        run_bruteforce_trial(params, spec, 64, policy, rng).details["true_seed_survives"]
        for _ in range(100)
    )
    return {"true_seed_survival": kept / 100}


def bench_correlation():
    params = SystemParams(64, 400)
    spec = LfsrSpec.primitive(16)
    rng = derive_rng(0, "bench-correlation")
    plain = sum(run_correlation_trial(params, LfsrExpander(spec), 256, 1, rng).success for _ in range(50))
    filtered = sum(
        run_correlation_trial(params, FilteredLfsrExpander(spec), 256, 1, rng).success for _ in range(50)
    )
    return {"linear_success": plain / 50, "filtered_success": filtered / 50}


def bench_joint():
    curve = pe_vs_n(LfsrSpec.primitive(8), SystemParams(16, 4), [0, 16, 64, 256])
    return {"pe": {str(n): pe for n, pe in curve.rows}}


def bench_dsr():
    table = dsr_scaling_experiment(3.0, [100, 1000, 10000], 100000, derive_rng(0, "bench-dsr"))
    return {"eve_gamma": [round(r.eve_gamma, 3) for r in table.rows], "failures": table.failures()}


def run_benchmarks():
    """Run full benchmark suite."""
    print("=" * 60)
    print("alphaeta lab - Performance Benchmarks")
    print("=" * 60)
    print()

    workloads = [
        ("Gamma anchor", bench_gamma),
        ("Bob/Eve separation", bench_separation),
        ("Assisted brute force", bench_bruteforce),
        ("Correlation attack", bench_correlation),
        ("Joint SRM", bench_joint),
        ("DSR scaling", bench_dsr),
    ]

    results = []

    for label, fn in workloads:
        print(f"Running {label}...", end=" ", flush=True)
        start = time.time()
        outcome = fn()
        elapsed = time.time() - start
        print(f"{elapsed:.2f}s")
        results.append({"workload": label, "time_s": round(elapsed, 3), "result": outcome})

    print()
    print("=" * 60)
    print("Summary")
    print("=" * 60)
    print()
    print(f"{'Workload':<25} {'Time':<10}")
    print("-" * 60)
    for result in results:
        print(f"{result['workload']:<25} {result['time_s']:.2f}s")

    # Save results
    output_file = Path(__file__).parent / "results" / "benchmark_results.json"
    output_file.parent.mkdir(exist_ok=True)
    with open(output_file, "w") as f:
        json.dump(results, f, indent=2, default=lambda v: v.item() if isinstance(v, np.generic) else str(v))

    print()
    print(f"Results saved to: {output_file}")


if __name__ == "__main__":
    run_benchmarks()
