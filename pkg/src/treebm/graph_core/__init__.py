"""Metric graphs, their cover trees, ends and exact tree geometry."""

from .ends import (
    Cone,
    End,
    EndCylinder,
    act_on_end,
    cone_of,
    cylinder_of,
    cylinders_at_depth,
    end_from_words,
    greedy_ray,
    make_end,
    parse_end,
)
from .metric_graph import (
    MetricGraph,
    concat,
    graph_from_dict,
    load_graph,
    parse_length,
    reduce_path,
    reverse_path,
    rose,
)
from .tree import (
    NEG_INF,
    TreePoint,
    act_on_point,
    address,
    axis_endpoints,
    beta,
    busemann,
    distance_to_geodesic,
    geodesic_vertex,
    point_on_edge,
    shadow,
    translation_length,
    tree_distance,
    vertex,
    vertex_at,
)
from .words import Word, cyclic_reduction, enumerate_words, path_of_word, word_of_path
