# config.py

DEFAULT_CONFIGS = {
    # Sweep settings
    "Q_FACTORS": [8, 16, 32, 36, 70],
    "EXTENDED_Q_FACTORS": [2, 4, 8, 16, 32, 36, 60, 70, 90, 120],
    "SCHEMES": ["mtgsc", "scmneqr", "dctefrqi"],
    "WORKERS": 0,  # 0 lets Qt pick the ideal thread count

    # Paths
    "OUTPUT_DIR": "out",
    "DATASET_DIR": "datasets",
    "MANIFEST": "manifest.txt",

    # Codec settings
    "BLOCK_SIZE": 8,
    "COEFF_QUBITS": 8,
    "PSNR_PEAK": 255,

    # Simulator / export limits
    "SIM_MAX_QUBITS": 20,
    "EXPORT_MAX_QUBITS": 16,
    "EQUIVALENCE_TOLERANCE": 1e-9,
    "VERIFY_SAMPLE_BLOCKS": 4,

    # Feature flags
    "LEVEL_SHIFT": False,
    "EMIT_CIRCUITS": False,
    "EMIT_RECON": False,
    "JPEG_PROXY": True,
    "LOG_LEVEL": "INFO",
}
