"""Non-uniform quantization codebooks and hybrid precoding for mmWave MIMO."""

from .channel import (ChannelRealization, SpatialLobeProfile, array_response, generate_channel,
                      generate_channel_clustered, sample_lobe_profile, steering_matrix)
from .codebooks import (Codebook, Structure, build_nuq_codebook_full, build_nuq_codebook_sub,
                        build_uq_codebook, equivalent_bits, feedback_bits, lobe_grids)
from .errors import InvalidArgument, InvalidConfiguration, InvalidProfile
from .harness import Axis, ResultRecord, ScenarioConfig, Scheme, run_scenario, sweep, write_results
from .metrics import LinkBudget, spectral_efficiency
from .precoding_full import PrecoderSet, fully_digital, nuq_hyp_full, uq_omp, uq_omp_design
from .precoding_sub import SubArrayLayout, nuq_hyp_sub

__version__ = "0.1.0"
