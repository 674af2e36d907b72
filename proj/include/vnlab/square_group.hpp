#pragma once

// Square complexes with unique continuation and their normal forms.
//
// A normal form is a maximal reduced flat connection on a monotone lattice
// region anchored at the origin. Every word in the generators has exactly one
// normal form, and two words are equal in the group iff their normal forms
// coincide, so the normal form doubles as the word-problem solver.

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vnlab::square {

enum class Orientation : std::uint8_t { Horizontal, Vertical };

struct GeneratorSymbol {
  std::int32_t family = 0;
  std::int64_t index = 0;
  Orientation orientation = Orientation::Horizontal;
  bool inverted = false;

  GeneratorSymbol inverse() const {
    GeneratorSymbol s = *this;
    s.inverted = !s.inverted;
    return s;
  }
  auto operator<=>(const GeneratorSymbol&) const = default;
};

GeneratorSymbol horizontal(std::int32_t family, std::int64_t index = 0);
GeneratorSymbol vertical(std::int32_t family, std::int64_t index = 0);

// Token of the form e<family>_<index>^{+1} or e<family>_<index>^{-1}.
std::string to_string(const GeneratorSymbol& s);

using Quadruple = std::array<GeneratorSymbol, 4>;
using SymbolPair = std::pair<GeneratorSymbol, GeneratorSymbol>;

struct InvalidBase : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct UniqueContinuationViolation : InvalidBase {
  using InvalidBase::InvalidBase;
};
struct OrientationMismatch : InvalidBase {
  using InvalidBase::InvalidBase;
};
struct NotMonotone : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Square complex given by its completion oracle. complete(x, y) returns the
// unique (z, w) with x y z w = id among the relators, or nothing.
//
// The relator set is closed under cyclic rotation and under reversal with
// inversion: if x y z w is a relator then so is w^-1 z^-1 y^-1 x^-1. Both
// are the same square read in the two senses, so the oracle answers for
// both.
class SquareBase {
 public:
  virtual ~SquareBase() = default;
  virtual std::optional<SymbolPair> complete(const GeneratorSymbol& first,
                                             const GeneratorSymbol& second) const = 0;
};

// Finite base from an explicit list of quadruples.
class ExplicitBase : public SquareBase {
 public:
  std::optional<SymbolPair> complete(const GeneratorSymbol& first,
                                     const GeneratorSymbol& second) const override;

  const std::vector<Quadruple>& quadruples() const { return quads_; }
  // All rotations and reversed rotations, one per ordered leading pair.
  std::vector<Quadruple> closure() const;

 private:
  friend ExplicitBase validate_base(std::span<const Quadruple> quads);
  std::vector<Quadruple> quads_;
  std::map<SymbolPair, SymbolPair> table_;
};

// Checks alternation of orientations, a fixed orientation per family and
// unique continuation over the closure. Throws on violation.
ExplicitBase validate_base(std::span<const Quadruple> quads);

// Edge of the integer lattice stored in its right/up direction.
enum class Direction : std::uint8_t { Right, Up };

struct Edge {
  int x = 0;
  int y = 0;
  Direction dir = Direction::Right;
  auto operator<=>(const Edge&) const = default;
};

// Monotone region with endpoints (0,0) and (n,m): the set of lattice points
// between a lower and an upper monotone path. Column x is the interval
// [lo(x), hi(x)].
class MonotoneRegion {
 public:
  MonotoneRegion();  // the single point (0,0)
  MonotoneRegion(std::vector<int> lo, std::vector<int> hi);

  // Paths are strings over {R, U}; both must end at the same point and the
  // lower path must never rise above the upper one.
  static MonotoneRegion from_paths(std::string_view lower, std::string_view upper);
  static MonotoneRegion from_path(std::string_view steps) { return from_paths(steps, steps); }

  int width() const { return static_cast<int>(lo_.size()) - 1; }
  int height() const { return hi_.back(); }
  int lo(int x) const { return lo_[x]; }
  int hi(int x) const { return hi_[x]; }
  const std::vector<int>& lows() const { return lo_; }
  const std::vector<int>& highs() const { return hi_; }

  bool contains(int x, int y) const;
  bool has_edge(const Edge& e) const;
  bool has_square(int x, int y) const;  // lower-left corner
  std::vector<Edge> edges() const;
  std::size_t point_count() const;

  std::string lower_path() const;
  std::string upper_path() const;

  auto operator<=>(const MonotoneRegion&) const = default;

 private:
  void check() const;
  std::vector<int> lo_;
  std::vector<int> hi_;
};

struct LabeledPath {
  std::string steps;                    // over {R, U}
  std::vector<GeneratorSymbol> labels;  // one per step, in walking order
};

class FlatConnection {
 public:
  FlatConnection() = default;
  // Labels must cover exactly the edges of the region, horizontal symbols on
  // horizontal edges and vertical ones on vertical edges.
  FlatConnection(MonotoneRegion region, std::map<Edge, GeneratorSymbol> labels);

  static FlatConnection from_path(const LabeledPath& path);

  const MonotoneRegion& region() const { return region_; }
  const std::map<Edge, GeneratorSymbol>& labels() const { return labels_; }
  const GeneratorSymbol& label(const Edge& e) const;
  std::pair<int, int> endpoint() const { return {region_.width(), region_.height()}; }
  bool empty() const { return region_.width() == 0 && region_.height() == 0; }

  auto operator<=>(const FlatConnection&) const = default;

 private:
  friend class ConnectionEditor;
  MonotoneRegion region_;
  std::map<Edge, GeneratorSymbol> labels_;
};

bool is_flat(const FlatConnection& conn, const SquareBase& base);
bool is_reduced(const FlatConnection& conn);
bool is_maximal(const FlatConnection& conn, const SquareBase& base);

// Flat extension of a labeled path to a region containing it. Empty if some
// square of the region cannot be filled.
std::optional<FlatConnection> complete_from_path(const LabeledPath& path,
                                                 const MonotoneRegion& target,
                                                 const SquareBase& base);

// Adds one-point pops until none applies. The fixpoint does not depend on the
// order in which pops are tried; the shuffled variant exists to test that.
FlatConnection extend_maximal(FlatConnection conn, const SquareBase& base);
FlatConnection extend_maximal_shuffled(FlatConnection conn, const SquareBase& base,
                                       std::mt19937_64& rng);

// Maximal reduced flat connection. Equality is structural.
class NormalForm {
 public:
  NormalForm() = default;  // identity
  // Checks flatness, maximality and reducedness.
  static NormalForm from_connection(FlatConnection conn, const SquareBase& base);

  const FlatConnection& connection() const { return conn_; }
  bool is_identity() const { return conn_.empty(); }

  // Applies f to every label. f must be an automorphism of the base, which
  // keeps the result a normal form; nothing is rechecked.
  NormalForm relabel(const std::function<GeneratorSymbol(const GeneratorSymbol&)>& f) const;

  auto operator<=>(const NormalForm&) const = default;

 private:
  friend NormalForm concatenate(const NormalForm&, const GeneratorSymbol&, const SquareBase&);
  explicit NormalForm(FlatConnection c) : conn_(std::move(c)) {}
  FlatConnection conn_;
};

NormalForm concatenate(const NormalForm& nf, const GeneratorSymbol& x, const SquareBase& base);
NormalForm normal_form(std::span<const GeneratorSymbol> word, const SquareBase& base);

// Word read along the lower boundary path.
std::vector<GeneratorSymbol> integrate(const FlatConnection& conn);
// Word read along an arbitrary monotone path inside the region.
std::vector<GeneratorSymbol> integrate_along(const FlatConnection& conn, std::string_view steps);

// Group operations on normal forms.
NormalForm multiply(const NormalForm& a, const NormalForm& b, const SquareBase& base);
NormalForm inverse(const NormalForm& a, const SquareBase& base);
std::vector<GeneratorSymbol> inverse_word(std::span<const GeneratorSymbol> word);
std::vector<GeneratorSymbol> free_reduce(std::span<const GeneratorSymbol> word);

// Canonical text: endpoint, lower path, upper path, then labels in edge
// order. Two normal forms are equal iff their serializations are.
std::string serialize(const FlatConnection& conn);
inline std::string serialize(const NormalForm& nf) { return serialize(nf.connection()); }

}  // namespace vnlab::square
