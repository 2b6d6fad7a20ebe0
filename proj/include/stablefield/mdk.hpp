#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stablefield/geometry.hpp"

namespace stablefield {

// ---------------------------------------------------------------------------
// Separators: the index objects of the separating set families.
//   r*: hyperplane {y: <dir,y> = offset}, |dir| = 1, offset > 0;
//   s2: great circle with unit pole;
//   h2: geodesic = circular arc orthogonal to the unit circle, center
//       e^{i psi}/cos(phi), radius tan(phi), phi in (0, pi/2], psi in [0, 2 pi).
// ---------------------------------------------------------------------------

struct Separator {
    SpaceKind kind = SpaceKind::Euclidean1;
    Vec3 dir{1, 0, 0};      // Euclidean
    double offset = 1.0;    // Euclidean
    Vec3 pole{0, 0, 1};     // Sphere2
    double phi = 1.0;       // HyperbolicDisc
    double psi = 0.0;

    static Separator hyperplane(SpaceKind kind, const Vec3& dir, double offset);
    static Separator great_circle(const Vec3& pole);
    static Separator disc_geodesic(double phi, double psi);
    void validate() const;
};

// True iff the separator lies in A_x, i.e. separates x from the base point.
// Boundary coincidences count as not separating.
bool separates(const Separator& h, const SpacePoint& x);

// ---------------------------------------------------------------------------
// Set families: the invariant separating family of a space, or the family of
// coordinate boxes [0,t] on R^n_+ with Lebesgue measure (exact arithmetic).
// ---------------------------------------------------------------------------

struct SetFamily {
    enum class Tag { Separating, Box };
    Tag tag = Tag::Separating;
    // Separating: the space. Box: Euclidean1..3 carries the box dimension.
    SpaceKind space = SpaceKind::Euclidean1;

    static SetFamily separating(SpaceKind s) { return {Tag::Separating, s}; }
    static SetFamily box(int n);
    int box_dim() const;
    std::string name() const;                      // "r1".."h2", "box1".."box3"
    static SetFamily from_name(const std::string&);  // accepts "box" as box2
};

// ---------------------------------------------------------------------------
// Cell measure tables
// ---------------------------------------------------------------------------

enum class CellMethod { Exact, Quadrature, MonteCarlo };
std::string cell_method_name(CellMethod m);
CellMethod cell_method_from_name(const std::string& s);

struct PrecisionBudget {
    double abs_tol = 1e-7;
    double rel_tol = 1e-6;
    std::size_t max_evals = 4'000'000;  // fiber evaluations
};

// Masses of the 2^d - 1 nonempty Boolean cells of d sets. Index masks use
// bit j for point j+1, so the bit-string form reads point 1 leftmost.
struct CellMeasureTable {
    int d = 0;
    std::vector<double> mass;  // size 1 << d, mass[0] = 0 by convention
    CellMethod method = CellMethod::Exact;
    double err = 0.0;
    bool converged = true;

    double mass_of(unsigned mask) const;
    double marginal(int j) const;   // mu(A_{j+1}) = sum over cells containing bit j
    double union_mass() const;      // mu(union A_j)
    double total() const { return union_mass(); }
    void validate() const;          // d in [1,8], sizes, nonnegativity, finiteness

    // Table from explicit masses (mass[0] ignored and forced to 0).
    static CellMeasureTable from_masses(int d, std::vector<double> masses,
                                        CellMethod method = CellMethod::Exact, double err = 0.0);
};

std::string mask_to_bits(unsigned mask, int d);   // "101": point 1 leftmost
unsigned bits_to_mask(const std::string& bits);

// Normalization constant of a space's separator measure, fixed so that
// mu(A_x) = distance(x, o). Computed by probing one point and verified
// against a second; cached per space. Throws std::runtime_error if the
// cross-check deviates by more than 1e-3 relative.
double calibrate_normalization(SpaceKind kind);

// Cell masses of {A_{x_1}, ..., A_{x_d}} under the family's measure.
CellMeasureTable cell_measures(const std::vector<SpacePoint>& points, const SetFamily& family,
                               const PrecisionBudget& budget = {});

// Cell masses of the increment sets {A_{g x_j} symdiff A_{g o}}. With
// g = identity this is exactly cell_measures (same code path).
CellMeasureTable increment_cell_measures(const std::vector<SpacePoint>& points,
                                         const GroupElement& g, const SetFamily& family,
                                         const PrecisionBudget& budget = {});

// mu(A_x symdiff A_y): the measure-definite kernel evaluated through the
// family. For separating families this must agree with distance(x, y).
double symmdiff_measure(const SpacePoint& x, const SpacePoint& y, const SetFamily& family,
                        const PrecisionBudget& budget = {});

// d = 1 table whose single cell is A_x symdiff A_y.
CellMeasureTable pair_symmdiff_table(const SpacePoint& x, const SpacePoint& y,
                                     const SetFamily& family, const PrecisionBudget& budget = {});

}  // namespace stablefield
