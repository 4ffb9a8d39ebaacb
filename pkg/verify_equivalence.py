# verify_equivalence.py

import encoders
import pipeline
from gate_stats import count_gates


def verify():
    print("Building the 62(X=3,Y=2) block with full and modified controls...")
    coeffs = encoders.WORKED_EXAMPLES["example_62"]
    full = encoders.build_scmneqr(coeffs)
    modified = encoders.build_mtgsc(coeffs)

    trigger_full = full.gates[full.prep_length]
    trigger_modified = modified.gates[modified.prep_length]
    print(f"Full trigger controls: {len(trigger_full.controls)}")
    print(f"Modified trigger controls: {len(trigger_modified.controls)}")

    stats = count_gates(modified, (8, 8))
    print(f"Discarded zero controls (b_z): {stats.b_z}")

    entry = pipeline.verify_block(coeffs)
    print(f"TV distance over all qubits: {entry['tv_distance']:.6f}")
    print(f"Classical decodes equal: {entry['decodes_equal']}")

    corner = pipeline.verify_block(encoders.WORKED_EXAMPLES["corner_77"])
    print(f"All-ones position TV distance: {corner['tv_distance']:.6f}")

    if (
        len(trigger_full.controls) == 6
        and len(trigger_modified.controls) == 3
        and stats.b_z == 3
        and entry["decodes_equal"]
        and corner["tv_distance"] == 0
    ):
        print("SUCCESS: Modified circuit drops the zero controls and decodes to the same coefficient.")
    else:
        print("FAILURE: Modified circuit does not match the full-control circuit.")


if __name__ == "__main__":
    verify()
