#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "stablefield/geometry.hpp"
#include "stablefield/karlin.hpp"
#include "stablefield/mdk.hpp"
#include "stablefield/sampling.hpp"

namespace stablefield {

// All human-facing numbers carry 9 significant digits.
std::string format_g9(double v);
// Round-trips v through its 9-digit decimal form, for clean JSON output.
double round_g9(double v);

// {"kind": "r2", "coords": [x, y]}; s2 uses 3 coords, h2 uses (Re z, Im z).
nlohmann::json point_to_json(const SpacePoint& p);
SpacePoint point_from_json(const nlohmann::json& j);

// Kind-discriminated: Euclidean {rot, shift}, s2 {rot}, h2 {a, b}.
nlohmann::json group_to_json(const GroupElement& g);
GroupElement group_from_json(const nlohmann::json& j);

// {"d": d, "cells": {"101": mass, ...}, "method": name, "err": e,
//  "converged": flag}; cell keys are bit strings with point 1 leftmost.
nlohmann::json cells_to_json(const CellMeasureTable& t);
CellMeasureTable cells_from_json(const nlohmann::json& j);

// Point list files: one point per line, whitespace- or comma-separated chart
// coordinates (r1: 1, r2/h2: 2, r3/s2: 3, box: box dimension); '#' starts a
// comment. Coordinates are validated against the space's constraints.
std::vector<SpacePoint> parse_points_text(const std::string& text, SpaceKind kind);
std::vector<SpacePoint> parse_points_file(const std::string& path, SpaceKind kind);

// One row per sample, one column per point. Leading '#' metadata lines:
// seed, alpha, beta (or base tag), alpha_prime when present, the point
// list, and the cell-measure method.
void write_sample_csv(std::ostream& os, const SampleBatch& batch,
                      const std::vector<SpacePoint>& points, CellMethod method);

// Convergence-run rows: (rho, realization id, U values..., odd counts per
// parity pattern).
void write_urn_csv_header(std::ostream& os, int d);
void write_urn_csv_row(std::ostream& os, double rho, std::size_t realization,
                       const UrnRealization& urn);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace stablefield
