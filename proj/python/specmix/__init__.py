"""SNR-guided band selection and spectral unmixing.

Thin wrapper over the compiled core; see the individual functions for the
numpy-facing API.
"""

from ._specmix import (  # noqa: F401
    AbundanceCube,
    BandMask,
    ComputeError,
    EndmemberSet,
    HyperCube,
    IoError,
    MatchReport,
    NnlsSolution,
    SnrProfile,
    SpectralLibrary,
    SynthTruth,
    apply_mask,
    band_snr,
    cosine_similarity,
    fourier_lowpass,
    generate_synthetic,
    kmeans_endmembers,
    l2_normalize,
    mask_library,
    match_endmembers,
    nnls_solve,
    read_abundance_maps,
    read_cube,
    read_spectral_library,
    rmse,
    run_pipeline,
    select_bands,
    sg_coefficients,
    sg_smooth,
    smooth_cube,
    unmix_cube,
    wavelet_denoise,
    write_abundance_maps,
    write_cube,
    write_spectral_library,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
