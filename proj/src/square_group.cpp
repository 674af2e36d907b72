#include "vnlab/square_group.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace vnlab::square {

GeneratorSymbol horizontal(std::int32_t family, std::int64_t index) {
  return GeneratorSymbol{family, index, Orientation::Horizontal, false};
}

GeneratorSymbol vertical(std::int32_t family, std::int64_t index) {
  return GeneratorSymbol{family, index, Orientation::Vertical, false};
}

std::string to_string(const GeneratorSymbol& s) {
  std::ostringstream os;
  os << 'e' << s.family << '_' << s.index << (s.inverted ? "^{-1}" : "^{+1}");
  return os.str();
}

// ---------------------------------------------------------------------------
// Bases

std::optional<SymbolPair> ExplicitBase::complete(const GeneratorSymbol& first,
                                                 const GeneratorSymbol& second) const {
  auto it = table_.find({first, second});
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

std::vector<Quadruple> ExplicitBase::closure() const {
  std::vector<Quadruple> out;
  out.reserve(table_.size());
  for (const auto& [lead, tail] : table_)
    out.push_back({lead.first, lead.second, tail.first, tail.second});
  return out;
}

ExplicitBase validate_base(std::span<const Quadruple> quads) {
  ExplicitBase base;
  std::map<std::int32_t, Orientation> family_orientation;
  for (const Quadruple& q : quads) {
    for (int i = 0; i < 4; ++i) {
      if (q[i].orientation == q[(i + 1) % 4].orientation)
        throw OrientationMismatch("quadruple does not alternate orientations at " +
                                  to_string(q[i]));
      auto [it, fresh] = family_orientation.emplace(q[i].family, q[i].orientation);
      if (!fresh && it->second != q[i].orientation)
        throw OrientationMismatch("family " + std::to_string(q[i].family) +
                                  " used with both orientations");
    }
    const Quadruple reversed{q[3].inverse(), q[2].inverse(), q[1].inverse(), q[0].inverse()};
    for (const Quadruple& r : {q, reversed}) {
      for (int s = 0; s < 4; ++s) {
        SymbolPair lead{r[s], r[(s + 1) % 4]};
        SymbolPair tail{r[(s + 2) % 4], r[(s + 3) % 4]};
        auto [it, fresh] = base.table_.emplace(lead, tail);
        if (!fresh && it->second != tail)
          throw UniqueContinuationViolation("pair (" + to_string(lead.first) + ", " +
                                            to_string(lead.second) +
                                            ") has two completions");
      }
    }
    base.quads_.push_back(q);
  }
  return base;
}

// ---------------------------------------------------------------------------
// Regions

MonotoneRegion::MonotoneRegion() : lo_{0}, hi_{0} {}

MonotoneRegion::MonotoneRegion(std::vector<int> lo, std::vector<int> hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
  check();
}

void MonotoneRegion::check() const {
  if (lo_.empty() || lo_.size() != hi_.size()) throw NotMonotone("column data size mismatch");
  if (lo_[0] != 0) throw NotMonotone("region must contain the origin");
  for (std::size_t x = 0; x < lo_.size(); ++x) {
    if (lo_[x] > hi_[x]) throw NotMonotone("empty column");
    if (x + 1 < lo_.size()) {
      if (lo_[x + 1] < lo_[x] || hi_[x + 1] < hi_[x]) throw NotMonotone("paths not monotone");
      if (lo_[x + 1] > hi_[x]) throw NotMonotone("region is disconnected");
    }
  }
}

MonotoneRegion MonotoneRegion::from_paths(std::string_view lower, std::string_view upper) {
  auto columns = [](std::string_view path, bool take_low) {
    std::vector<int> v{0};
    int y = 0;
    for (char c : path) {
      if (c == 'R') {
        v.push_back(y);
      } else if (c == 'U') {
        ++y;
        if (!take_low) v.back() = y;
      } else {
        throw NotMonotone(std::string("bad path step '") + c + "'");
      }
    }
    return std::pair{v, y};
  };
  auto [lo, m1] = columns(lower, true);
  auto [hi, m2] = columns(upper, false);
  if (lo.size() != hi.size() || m1 != m2) throw NotMonotone("paths end at different points");
  for (std::size_t x = 0; x < lo.size(); ++x)
    if (lo[x] > hi[x]) throw NotMonotone("lower path crosses the upper path");
  return MonotoneRegion(std::move(lo), std::move(hi));
}

bool MonotoneRegion::contains(int x, int y) const {
  return x >= 0 && x <= width() && y >= lo_[x] && y <= hi_[x];
}

bool MonotoneRegion::has_edge(const Edge& e) const {
  if (e.dir == Direction::Right) return contains(e.x, e.y) && contains(e.x + 1, e.y);
  return contains(e.x, e.y) && contains(e.x, e.y + 1);
}

bool MonotoneRegion::has_square(int x, int y) const {
  return contains(x, y) && contains(x + 1, y) && contains(x, y + 1) && contains(x + 1, y + 1);
}

std::vector<Edge> MonotoneRegion::edges() const {
  std::vector<Edge> out;
  const int n = width();
  for (int x = 0; x <= n; ++x) {
    for (int y = lo_[x]; y <= hi_[x]; ++y) {
      if (x < n && y >= lo_[x + 1]) out.push_back({x, y, Direction::Right});
      if (y < hi_[x]) out.push_back({x, y, Direction::Up});
    }
  }
  return out;
}

std::size_t MonotoneRegion::point_count() const {
  std::size_t c = 0;
  for (std::size_t x = 0; x < lo_.size(); ++x) c += hi_[x] - lo_[x] + 1;
  return c;
}

std::string MonotoneRegion::lower_path() const {
  std::string s;
  const int n = width();
  for (int x = 0; x <= n; ++x) {
    const int top = x < n ? lo_[x + 1] : height();
    s.append(top - lo_[x], 'U');
    if (x < n) s.push_back('R');
  }
  return s;
}

std::string MonotoneRegion::upper_path() const {
  std::string s;
  const int n = width();
  for (int x = 0; x <= n; ++x) {
    const int bottom = x > 0 ? hi_[x - 1] : 0;
    s.append(hi_[x] - bottom, 'U');
    if (x < n) s.push_back('R');
  }
  return s;
}

// ---------------------------------------------------------------------------
// Connections

namespace {

Orientation orientation_of(Direction d) {
  return d == Direction::Right ? Orientation::Horizontal : Orientation::Vertical;
}

}  // namespace

FlatConnection::FlatConnection(MonotoneRegion region, std::map<Edge, GeneratorSymbol> labels)
    : region_(std::move(region)), labels_(std::move(labels)) {
  const auto edges = region_.edges();
  if (edges.size() != labels_.size())
    throw std::invalid_argument("labels do not match the edges of the region");
  for (const Edge& e : edges) {
    auto it = labels_.find(e);
    if (it == labels_.end()) throw std::invalid_argument("unlabeled edge");
    if (it->second.orientation != orientation_of(e.dir))
      throw OrientationMismatch("symbol " + to_string(it->second) + " on an edge of the other kind");
  }
}

FlatConnection FlatConnection::from_path(const LabeledPath& path) {
  if (path.steps.size() != path.labels.size())
    throw std::invalid_argument("path and label lengths differ");
  std::map<Edge, GeneratorSymbol> labels;
  int x = 0, y = 0;
  for (std::size_t i = 0; i < path.steps.size(); ++i) {
    if (path.steps[i] == 'R') {
      labels[{x, y, Direction::Right}] = path.labels[i];
      ++x;
    } else {
      labels[{x, y, Direction::Up}] = path.labels[i];
      ++y;
    }
  }
  return FlatConnection(MonotoneRegion::from_path(path.steps), std::move(labels));
}

const GeneratorSymbol& FlatConnection::label(const Edge& e) const {
  auto it = labels_.find(e);
  if (it == labels_.end()) throw std::out_of_range("edge not in region");
  return it->second;
}

// Internal mutation helpers. Each pop adds one lattice point and one square.
class ConnectionEditor {
 public:
  using Labels = std::map<Edge, GeneratorSymbol>;

  static bool can_pop_up(const MonotoneRegion& r, int x, const MonotoneRegion* bound) {
    if (x >= r.width() || r.hi(x) + 1 > r.hi(x + 1)) return false;
    return bound == nullptr || r.hi(x) + 1 <= bound->hi(x);
  }
  static bool can_pop_down(const MonotoneRegion& r, int x, const MonotoneRegion* bound) {
    if (x <= 0 || r.lo(x) - 1 < r.lo(x - 1)) return false;
    return bound == nullptr || r.lo(x) - 1 >= bound->lo(x);
  }

  // Square with lower-left corner (x, h), h = hi(x); the new point is (x, h+1).
  static std::optional<std::pair<GeneratorSymbol, GeneratorSymbol>> fill_up(
      const FlatConnection& c, int x, const SquareBase& base) {
    const int h = c.region_.hi(x);
    const auto& bottom = c.labels_.at({x, h, Direction::Right});
    const auto& right = c.labels_.at({x + 1, h, Direction::Up});
    auto t = base.complete(bottom, right);
    if (!t) return std::nullopt;
    return std::pair{t->first.inverse(), t->second.inverse()};  // top, left
  }

  // Square with lower-left corner (x-1, l-1), l = lo(x); the new point is (x, l-1).
  static std::optional<std::pair<GeneratorSymbol, GeneratorSymbol>> fill_down(
      const FlatConnection& c, int x, const SquareBase& base) {
    const int l = c.region_.lo(x);
    const auto& left = c.labels_.at({x - 1, l - 1, Direction::Up});
    const auto& top = c.labels_.at({x - 1, l, Direction::Right});
    return base.complete(top.inverse(), left.inverse());  // bottom, right
  }

  static bool pop_up(FlatConnection& c, int x, const SquareBase& base,
                     const MonotoneRegion* bound = nullptr, bool* failed = nullptr) {
    if (!can_pop_up(c.region_, x, bound)) return false;
    auto fill = fill_up(c, x, base);
    if (!fill) {
      if (failed) *failed = true;
      return false;
    }
    const int h = c.region_.hi(x);
    c.labels_[{x, h + 1, Direction::Right}] = fill->first;
    c.labels_[{x, h, Direction::Up}] = fill->second;
    auto hi = c.region_.highs();
    ++hi[x];
    c.region_ = MonotoneRegion(c.region_.lows(), std::move(hi));
    return true;
  }

  static bool pop_down(FlatConnection& c, int x, const SquareBase& base,
                       const MonotoneRegion* bound = nullptr, bool* failed = nullptr) {
    if (!can_pop_down(c.region_, x, bound)) return false;
    auto fill = fill_down(c, x, base);
    if (!fill) {
      if (failed) *failed = true;
      return false;
    }
    const int l = c.region_.lo(x);
    c.labels_[{x - 1, l - 1, Direction::Right}] = fill->first;
    c.labels_[{x, l - 1, Direction::Up}] = fill->second;
    auto lo = c.region_.lows();
    --lo[x];
    c.region_ = MonotoneRegion(std::move(lo), c.region_.highs());
    return true;
  }

  static void append_column(FlatConnection& c, const GeneratorSymbol& s) {
    const auto [n, m] = c.endpoint();
    auto lo = c.region_.lows();
    auto hi = c.region_.highs();
    lo.push_back(m);
    hi.push_back(m);
    c.labels_[{n, m, Direction::Right}] = s;
    c.region_ = MonotoneRegion(std::move(lo), std::move(hi));
  }

  static void drop_column(FlatConnection& c) {
    const int n = c.region_.width();
    std::erase_if(c.labels_, [n](const auto& kv) {
      const Edge& e = kv.first;
      return (e.dir == Direction::Right && e.x == n - 1) || (e.dir == Direction::Up && e.x == n);
    });
    auto lo = c.region_.lows();
    auto hi = c.region_.highs();
    lo.pop_back();
    hi.pop_back();
    c.region_ = MonotoneRegion(std::move(lo), std::move(hi));
  }

  static void append_row(FlatConnection& c, const GeneratorSymbol& s) {
    const auto [n, m] = c.endpoint();
    auto hi = c.region_.highs();
    ++hi[n];
    c.labels_[{n, m, Direction::Up}] = s;
    c.region_ = MonotoneRegion(c.region_.lows(), std::move(hi));
  }

  static void drop_row(FlatConnection& c) {
    const int m = c.region_.height();
    std::erase_if(c.labels_, [m](const auto& kv) {
      const Edge& e = kv.first;
      return (e.dir == Direction::Right && e.y == m) || (e.dir == Direction::Up && e.y == m - 1);
    });
    auto hi = c.region_.highs();
    for (int& h : hi) h = std::min(h, m - 1);
    c.region_ = MonotoneRegion(c.region_.lows(), std::move(hi));
  }

  static Labels& labels(FlatConnection& c) { return c.labels_; }
};

bool is_flat(const FlatConnection& conn, const SquareBase& base) {
  const auto& r = conn.region();
  for (int x = 0; x < r.width(); ++x) {
    for (int y = r.lo(x + 1); y < r.hi(x); ++y) {
      const auto& bottom = conn.label({x, y, Direction::Right});
      const auto& right = conn.label({x + 1, y, Direction::Up});
      const auto& top = conn.label({x, y + 1, Direction::Right});
      const auto& left = conn.label({x, y, Direction::Up});
      const auto ccw = base.complete(bottom, right);
      if (!ccw || ccw->first != top.inverse() || ccw->second != left.inverse()) return false;
      const auto cw = base.complete(left, top);
      if (!cw || cw->first != right.inverse() || cw->second != bottom.inverse()) return false;
    }
  }
  return true;
}

bool is_reduced(const FlatConnection& conn) {
  for (const auto& [e, s] : conn.labels()) {
    Edge next = e;
    (e.dir == Direction::Right ? next.x : next.y) += 1;
    auto it = conn.labels().find(next);
    if (it != conn.labels().end() && it->second == s.inverse()) return false;
  }
  return true;
}

bool is_maximal(const FlatConnection& conn, const SquareBase& base) {
  const auto& r = conn.region();
  for (int x = 0; x <= r.width(); ++x) {
    if (ConnectionEditor::can_pop_down(r, x, nullptr) && ConnectionEditor::fill_down(conn, x, base))
      return false;
    if (ConnectionEditor::can_pop_up(r, x, nullptr) && ConnectionEditor::fill_up(conn, x, base))
      return false;
  }
  return true;
}

std::optional<FlatConnection> complete_from_path(const LabeledPath& path,
                                                 const MonotoneRegion& target,
                                                 const SquareBase& base) {
  FlatConnection conn = FlatConnection::from_path(path);
  const auto& r0 = conn.region();
  if (r0.width() != target.width() || r0.height() != target.height())
    throw std::invalid_argument("path and region have different endpoints");
  for (int x = 0; x <= target.width(); ++x)
    if (!target.contains(x, r0.lo(x)) || !target.contains(x, r0.hi(x)))
      throw std::invalid_argument("path leaves the region");
  while (conn.region() != target) {
    bool progressed = false;
    bool failed = false;
    for (int x = 0; x <= target.width() && !progressed; ++x) {
      progressed = ConnectionEditor::pop_down(conn, x, base, &target, &failed) ||
                   ConnectionEditor::pop_up(conn, x, base, &target, &failed);
      if (failed) return std::nullopt;
    }
    if (!progressed) throw std::logic_error("no pop available inside a strictly larger region");
  }
  return conn;
}

FlatConnection extend_maximal(FlatConnection conn, const SquareBase& base) {
  int x = 0;
  while (x <= conn.region().width()) {
    if (ConnectionEditor::pop_down(conn, x, base) || ConnectionEditor::pop_up(conn, x, base)) {
      x = std::max(0, x - 1);
    } else {
      ++x;
    }
  }
  return conn;
}

FlatConnection extend_maximal_shuffled(FlatConnection conn, const SquareBase& base,
                                       std::mt19937_64& rng) {
  for (;;) {
    std::vector<std::pair<int, bool>> candidates;
    for (int x = 0; x <= conn.region().width(); ++x) {
      candidates.emplace_back(x, false);
      candidates.emplace_back(x, true);
    }
    std::shuffle(candidates.begin(), candidates.end(), rng);
    bool changed = false;
    for (const auto& [x, up] : candidates)
      changed |= up ? ConnectionEditor::pop_up(conn, x, base)
                    : ConnectionEditor::pop_down(conn, x, base);
    if (!changed) return conn;
  }
}

// ---------------------------------------------------------------------------
// Normal forms

NormalForm NormalForm::from_connection(FlatConnection conn, const SquareBase& base) {
  if (!is_flat(conn, base)) throw std::invalid_argument("connection is not flat");
  if (!is_maximal(conn, base)) throw std::invalid_argument("connection is not maximal");
  if (!is_reduced(conn)) throw std::invalid_argument("connection is not reduced");
  return NormalForm(std::move(conn));
}

NormalForm NormalForm::relabel(
    const std::function<GeneratorSymbol(const GeneratorSymbol&)>& f) const {
  NormalForm out = *this;
  for (auto& [e, s] : ConnectionEditor::labels(out.conn_)) s = f(s);
  return out;
}

NormalForm concatenate(const NormalForm& nf, const GeneratorSymbol& x, const SquareBase& base) {
  FlatConnection c = nf.connection();
  const auto [n, m] = c.endpoint();
  const auto& r = c.region();
  if (x.orientation == Orientation::Horizontal) {
    if (n > 0 && r.hi(n - 1) == m && c.label({n - 1, m, Direction::Right}) == x.inverse()) {
      ConnectionEditor::drop_column(c);
      if (!is_maximal(c, base)) throw std::logic_error("collapse left a non-maximal connection");
    } else {
      ConnectionEditor::append_column(c, x);
      c = extend_maximal(std::move(c), base);
    }
  } else {
    if (m > 0 && r.lo(n) <= m - 1 && c.label({n, m - 1, Direction::Up}) == x.inverse()) {
      ConnectionEditor::drop_row(c);
      if (!is_maximal(c, base)) throw std::logic_error("collapse left a non-maximal connection");
    } else {
      ConnectionEditor::append_row(c, x);
      c = extend_maximal(std::move(c), base);
    }
  }
  if (!is_reduced(c)) throw std::logic_error("concatenation produced a non-reduced connection");
  return NormalForm(std::move(c));
}

NormalForm normal_form(std::span<const GeneratorSymbol> word, const SquareBase& base) {
  NormalForm nf;
  for (const auto& s : word) nf = concatenate(nf, s, base);
  return nf;
}

std::vector<GeneratorSymbol> integrate_along(const FlatConnection& conn, std::string_view steps) {
  std::vector<GeneratorSymbol> out;
  out.reserve(steps.size());
  int x = 0, y = 0;
  for (char c : steps) {
    Edge e{x, y, c == 'R' ? Direction::Right : Direction::Up};
    if (c != 'R' && c != 'U') throw NotMonotone("bad path step");
    out.push_back(conn.label(e));
    (c == 'R' ? x : y) += 1;
  }
  if (std::pair{x, y} != conn.endpoint()) throw std::invalid_argument("path does not end at the endpoint");
  return out;
}

std::vector<GeneratorSymbol> integrate(const FlatConnection& conn) {
  return integrate_along(conn, conn.region().lower_path());
}

std::vector<GeneratorSymbol> inverse_word(std::span<const GeneratorSymbol> word) {
  std::vector<GeneratorSymbol> out;
  out.reserve(word.size());
  for (auto it = word.rbegin(); it != word.rend(); ++it) out.push_back(it->inverse());
  return out;
}

std::vector<GeneratorSymbol> free_reduce(std::span<const GeneratorSymbol> word) {
  std::vector<GeneratorSymbol> out;
  for (const auto& s : word) {
    if (!out.empty() && out.back() == s.inverse()) {
      out.pop_back();
    } else {
      out.push_back(s);
    }
  }
  return out;
}

NormalForm multiply(const NormalForm& a, const NormalForm& b, const SquareBase& base) {
  NormalForm out = a;
  for (const auto& s : integrate(b.connection())) out = concatenate(out, s, base);
  return out;
}

NormalForm inverse(const NormalForm& a, const SquareBase& base) {
  const auto w = inverse_word(integrate(a.connection()));
  return normal_form(w, base);
}

std::string serialize(const FlatConnection& conn) {
  std::ostringstream os;
  const auto [n, m] = conn.endpoint();
  os << n << ',' << m << ';' << conn.region().lower_path() << ';' << conn.region().upper_path()
     << ';';
  bool first = true;
  for (const auto& [e, s] : conn.labels()) {
    if (!first) os << ',';
    first = false;
    os << '(' << e.x << ',' << e.y << ',' << (e.dir == Direction::Right ? 'R' : 'U')
       << ")=" << to_string(s);
  }
  return os.str();
}

}  // namespace vnlab::square
