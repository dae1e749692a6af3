"""fmmc-lab: a workbench for matching-preserving random dimension reduction on
Euclidean-embedded graphs and spectral-gap optimization of chains on graphs."""

from .conductance import BoundChainReport, ConductanceCertificate, bound_chain_report, vertex_conductance_exact
from .dimred import (GoodnessEstimate, HeavyLightReport, Projector, apply_projector,
                     estimate_goodness, heavy_light_report, sample_projector)
from .graphs import (Embedding, FractionalMatching, Graph, VertexCover, WeightedGraph,
                     build_graph, center_embedding, gen_family, gen_star_union,
                     read_embedding, read_graph, total_pair_weight, weights_from_embedding,
                     write_embedding, write_graph)
from .matching import (LPSolveReport, fractional_matching, fractional_matching_oracle,
                       max_matching_exact, min_vertex_cover_lp)
from .pipeline import (LambdaValue, PipelineConfig, Theorem1Report, Theorem2Report,
                       dimension_for, graph_embedding, lambda_eval, run_full_pipeline,
                       run_theorem1_experiment, run_theorem2_experiment, sweep_dim_multiplier)
from .spectral import (FmmcResult, MarkovMatrix, SpectralSummary, fmmc_solve, lazy_walk,
                       project_to_feasible, spectral_summary, sym_eigs)

__version__ = "0.1.0"
