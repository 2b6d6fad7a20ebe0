#include "stablefield/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace stablefield {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

std::string format_g9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

double round_g9(double v) { return std::strtod(format_g9(v).c_str(), nullptr); }

nlohmann::json point_to_json(const SpacePoint& p) {
    const int n = space_dim(p.kind);
    nlohmann::json coords = nlohmann::json::array();
    for (int i = 0; i < n; ++i) coords.push_back(p.coords[static_cast<std::size_t>(i)]);
    return {{"kind", space_name(p.kind)}, {"coords", coords}};
}

SpacePoint point_from_json(const nlohmann::json& j) {
    require(j.is_object() && j.contains("kind") && j.contains("coords"),
            "point JSON needs kind and coords");
    SpacePoint p;
    p.kind = space_from_name(j.at("kind").get<std::string>());
    const auto& coords = j.at("coords");
    const int n = space_dim(p.kind);
    require(coords.is_array() && coords.size() == static_cast<std::size_t>(n),
            "point coords must match the space dimension");
    for (int i = 0; i < n; ++i)
        p.coords[static_cast<std::size_t>(i)] = coords.at(static_cast<std::size_t>(i)).get<double>();
    p.validate();
    return p;
}

namespace {

nlohmann::json mat_to_json(const Mat3& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < 3; ++i)
        rows.push_back({m.m[static_cast<std::size_t>(i)][0], m.m[static_cast<std::size_t>(i)][1],
                        m.m[static_cast<std::size_t>(i)][2]});
    return rows;
}

Mat3 mat_from_json(const nlohmann::json& j) {
    require(j.is_array() && j.size() == 3, "rotation must be a 3x3 array");
    Mat3 m;
    for (std::size_t i = 0; i < 3; ++i) {
        require(j.at(i).is_array() && j.at(i).size() == 3, "rotation must be a 3x3 array");
        for (std::size_t k = 0; k < 3; ++k) m.m[i][k] = j.at(i).at(k).get<double>();
    }
    return m;
}

}  // namespace

nlohmann::json group_to_json(const GroupElement& g) {
    nlohmann::json j{{"kind", space_name(g.kind)}};
    switch (g.kind) {
        case SpaceKind::Euclidean1:
        case SpaceKind::Euclidean2:
        case SpaceKind::Euclidean3:
            j["rot"] = mat_to_json(g.rot);
            j["shift"] = {g.shift[0], g.shift[1], g.shift[2]};
            break;
        case SpaceKind::Sphere2:
            j["rot"] = mat_to_json(g.rot);
            break;
        case SpaceKind::HyperbolicDisc:
            j["a"] = {g.mob_a.real(), g.mob_a.imag()};
            j["b"] = {g.mob_b.real(), g.mob_b.imag()};
            break;
    }
    return j;
}

GroupElement group_from_json(const nlohmann::json& j) {
    require(j.is_object() && j.contains("kind"), "group JSON needs a kind");
    GroupElement g = GroupElement::identity(space_from_name(j.at("kind").get<std::string>()));
    switch (g.kind) {
        case SpaceKind::Euclidean1:
        case SpaceKind::Euclidean2:
        case SpaceKind::Euclidean3: {
            g.rot = mat_from_json(j.at("rot"));
            const auto& s = j.at("shift");
            require(s.is_array() && s.size() == 3, "shift must have 3 entries");
            for (std::size_t i = 0; i < 3; ++i) g.shift[i] = s.at(i).get<double>();
            break;
        }
        case SpaceKind::Sphere2:
            g.rot = mat_from_json(j.at("rot"));
            break;
        case SpaceKind::HyperbolicDisc: {
            const auto& a = j.at("a");
            const auto& b = j.at("b");
            require(a.is_array() && a.size() == 2 && b.is_array() && b.size() == 2,
                    "a and b must be [re, im] pairs");
            g.mob_a = {a.at(0).get<double>(), a.at(1).get<double>()};
            g.mob_b = {b.at(0).get<double>(), b.at(1).get<double>()};
            break;
        }
    }
    g.validate();
    return g;
}

nlohmann::json cells_to_json(const CellMeasureTable& t) {
    t.validate();
    nlohmann::json cells = nlohmann::json::object();
    const unsigned n = 1u << t.d;
    for (unsigned mask = 1; mask < n; ++mask)
        cells[mask_to_bits(mask, t.d)] = t.mass[mask];
    return {{"d", t.d},
            {"cells", cells},
            {"method", cell_method_name(t.method)},
            {"err", t.err},
            {"converged", t.converged}};
}

CellMeasureTable cells_from_json(const nlohmann::json& j) {
    require(j.is_object() && j.contains("d") && j.contains("cells"),
            "cell table JSON needs d and cells");
    CellMeasureTable t;
    t.d = j.at("d").get<int>();
    require(t.d >= 1 && t.d <= 8, "cell table dimension must be 1..8");
    t.mass.assign(std::size_t{1} << t.d, 0.0);
    for (const auto& [key, val] : j.at("cells").items()) {
        const unsigned mask = bits_to_mask(key);
        require(key.size() == static_cast<std::size_t>(t.d), "cell key length must equal d");
        require(mask != 0, "cell keys must name a nonempty pattern");
        t.mass[mask] = val.get<double>();
    }
    if (j.contains("method")) t.method = cell_method_from_name(j.at("method").get<std::string>());
    if (j.contains("err")) t.err = j.at("err").get<double>();
    if (j.contains("converged")) t.converged = j.at("converged").get<bool>();
    t.validate();
    return t;
}

std::vector<SpacePoint> parse_points_text(const std::string& text, SpaceKind kind) {
    const int n = space_dim(kind);
    std::vector<SpacePoint> out;
    std::istringstream lines(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (const auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
        for (char& c : line)
            if (c == ',' || c == ';' || c == '\t') c = ' ';
        std::istringstream fields(line);
        std::vector<double> vals;
        double v;
        while (fields >> v) vals.push_back(v);
        if (vals.empty()) continue;
        if (vals.size() != static_cast<std::size_t>(n)) {
            std::ostringstream os;
            os << "line " << lineno << ": expected " << n << " coordinates, got " << vals.size();
            throw std::invalid_argument(os.str());
        }
        SpacePoint p;
        p.kind = kind;
        for (int i = 0; i < n; ++i) p.coords[static_cast<std::size_t>(i)] = vals[static_cast<std::size_t>(i)];
        p.validate();
        out.push_back(p);
    }
    return out;
}

std::vector<SpacePoint> parse_points_file(const std::string& path, SpaceKind kind) {
    return parse_points_text(read_text_file(path), kind);
}

void write_sample_csv(std::ostream& os, const SampleBatch& batch,
                      const std::vector<SpacePoint>& points, CellMethod method) {
    os << "# seed=" << batch.seed << "\n";
    os << "# alpha=" << format_g9(batch.alpha) << "\n";
    if (batch.beta)
        os << "# beta=" << format_g9(*batch.beta) << "\n";
    else if (batch.alpha_prime)
        os << "# alpha_prime=" << format_g9(*batch.alpha_prime) << "\n";
    else
        os << "# field=base\n";
    os << "# points=";
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i) os << "; ";
        os << space_name(points[i].kind) << ":";
        const int n = space_dim(points[i].kind);
        for (int k = 0; k < n; ++k) os << (k ? " " : "") << format_g9(points[i].coords[static_cast<std::size_t>(k)]);
    }
    os << "\n";
    os << "# cell_method=" << cell_method_name(method) << "\n";
    for (int j = 0; j < batch.d; ++j) os << (j ? "," : "") << "v" << (j + 1);
    os << "\n";
    for (std::size_t i = 0; i < batch.n; ++i) {
        for (int j = 0; j < batch.d; ++j) os << (j ? "," : "") << format_g9(batch.value(i, j));
        os << "\n";
    }
}

void write_urn_csv_header(std::ostream& os, int d) {
    os << "rho,realization";
    for (int j = 0; j < d; ++j) os << ",U" << (j + 1);
    const unsigned n = 1u << d;
    for (unsigned pat = 1; pat < n; ++pat) os << ",M_" << mask_to_bits(pat, d);
    os << "\n";
}

void write_urn_csv_row(std::ostream& os, double rho, std::size_t realization,
                       const UrnRealization& urn) {
    os << format_g9(rho) << "," << realization;
    for (double u : urn.U) os << "," << format_g9(u);
    for (std::size_t pat = 1; pat < urn.odd_counts.size(); ++pat) os << "," << urn.odd_counts[pat];
    os << "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << content;
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

}  // namespace stablefield
