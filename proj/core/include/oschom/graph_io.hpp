#pragma once

#include "oschom/gammacheck.hpp"
#include "oschom/metric.hpp"
#include "oschom/periodic_graph.hpp"

#include <filesystem>
#include <string>

namespace oschom {

// {dim, vertices: [[...]], edges: [{tail, head, shift, length, polyline}]}
std::string graph_to_json(const PeriodicGraph& g);
PeriodicGraph graph_from_json(const std::string& text);

// {dim, levels_used, directions, psi_values, ball_vertices, labels}
std::string metric_to_json(const HomogenizedMetric& m);

// 2D graph tiled over the 3x3 block of cells around the unit cell.
std::string graph_svg(const PeriodicGraph& g, const DiscreteCurve* overlay = nullptr, double overlay_scale = 1.0);

// 2D unit ball of the metric with the Euclidean unit circle overlaid.
std::string ball_svg(const HomogenizedMetric& m);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace oschom
