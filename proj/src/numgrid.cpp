#include "tern/numgrid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

namespace tern {

int scheme_order(Scheme s) { return s == Scheme::fd2 ? 2 : 4; }
int stencil_radius(Scheme s) { return s == Scheme::fd2 ? 1 : 2; }

// ---------------------------------------------------------------------------

MomentumGrid::MomentumGrid(const GridParams& p) : params_(p) {
    if (!(p.h > 0) || !(p.half_width > 0)) throw std::invalid_argument("grid: h and half_width must be positive");
    double cells = 2 * p.half_width / p.h;
    n_ = static_cast<int>(std::lround(cells));
    if (n_ < 1 || std::abs(cells - n_) > 1e-9 * cells) throw std::invalid_argument("grid: h must divide the box extent");
    if (p.rho_axis < 0 || p.rho_origin < 0) throw std::invalid_argument("grid: negative exclusion radius");
}

bool MomentumGrid::excluded(int i, int j, int k) const {
    double x = coord(i), y = coord(j), z = coord(k);
    double r2 = x * x + y * y;
    return r2 < params_.rho_axis * params_.rho_axis || r2 + z * z < params_.rho_origin * params_.rho_origin;
}

std::int64_t MomentumGrid::allowed_count() const {
    std::int64_t c = 0;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            for (int k = 0; k < n_; ++k) c += excluded(i, j, k) ? 0 : 1;
    return c;
}

bool MomentumGrid::same_as(const MomentumGrid& o) const {
    return this == &o || (n_ == o.n_ && params_.h == o.params_.h && params_.half_width == o.params_.half_width &&
                          params_.rho_axis == o.params_.rho_axis && params_.rho_origin == o.params_.rho_origin);
}

std::int64_t IndexBox::size() const {
    if (empty()) return 0;
    return std::int64_t(hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]);
}

bool IndexBox::contains(int i, int j, int k) const {
    return i >= lo[0] && i < hi[0] && j >= lo[1] && j < hi[1] && k >= lo[2] && k < hi[2];
}

namespace {

IndexBox unite(const IndexBox& a, const IndexBox& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    IndexBox u;
    for (int d = 0; d < 3; ++d) {
        u.lo[d] = std::min(a.lo[d], b.lo[d]);
        u.hi[d] = std::max(a.hi[d], b.hi[d]);
    }
    return u;
}

IndexBox intersect(const IndexBox& a, const IndexBox& b) {
    IndexBox u;
    for (int d = 0; d < 3; ++d) {
        u.lo[d] = std::max(a.lo[d], b.lo[d]);
        u.hi[d] = std::min(a.hi[d], b.hi[d]);
    }
    return u;
}

bool covers(const IndexBox& outer, const IndexBox& inner) {
    if (inner.empty()) return true;
    for (int d = 0; d < 3; ++d)
        if (inner.lo[d] < outer.lo[d] || inner.hi[d] > outer.hi[d]) return false;
    return true;
}

// Scalar grid function on a box.
struct Field {
    IndexBox box;
    std::vector<cplx> v;

    std::int64_t idx(int i, int j, int k) const {
        return (std::int64_t(i - box.lo[0]) * (box.hi[1] - box.lo[1]) + (j - box.lo[1])) * (box.hi[2] - box.lo[2]) +
               (k - box.lo[2]);
    }
    cplx get(int i, int j, int k) const { return box.contains(i, j, k) ? v[static_cast<std::size_t>(idx(i, j, k))] : cplx{}; }
};

template <typename F>
void for_each_node(const IndexBox& b, F&& f) {
    for (int i = b.lo[0]; i < b.hi[0]; ++i)
        for (int j = b.lo[1]; j < b.hi[1]; ++j)
            for (int k = b.lo[2]; k < b.hi[2]; ++k) f(i, j, k);
}

Field reflect(const Field& f, int n) {
    Field out;
    for (int d = 0; d < 3; ++d) {
        out.box.lo[d] = n - f.box.hi[d];
        out.box.hi[d] = n - f.box.lo[d];
    }
    out.v.resize(f.v.size());
    for_each_node(out.box, [&](int i, int j, int k) {
        out.v[static_cast<std::size_t>(out.idx(i, j, k))] = f.get(n - 1 - i, n - 1 - j, n - 1 - k);
    });
    return out;
}

Field differentiate(const Field& f, int axis, Scheme s, const MomentumGrid& g) {
    const int r = stencil_radius(s);
    static const double w2[] = {-0.5, 0.0, 0.5};
    static const double w4[] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
    const double* w = s == Scheme::fd2 ? w2 : w4;
    Field out;
    out.box = f.box;
    out.box.lo[axis] -= r;
    out.box.hi[axis] += r;
    if (out.box.lo[axis] < 0 || out.box.hi[axis] > g.n()) {
        // Only an error if something nonzero sits within the stencil radius of the edge.
        for_each_node(f.box, [&](int i, int j, int k) {
            std::array<int, 3> ix{i, j, k};
            if ((ix[axis] < r || ix[axis] >= g.n() - r) && f.v[static_cast<std::size_t>(f.idx(i, j, k))] != cplx{})
                throw std::domain_error("apply: support reaches the box edge within the stencil radius");
        });
        out.box.lo[axis] = std::max(out.box.lo[axis], 0);
        out.box.hi[axis] = std::min(out.box.hi[axis], g.n());
    }
    out.v.assign(static_cast<std::size_t>(out.box.size()), cplx{});
    const double inv_h = 1.0 / g.h();
    for_each_node(out.box, [&](int i, int j, int k) {
        cplx acc{};
        for (int o = -r; o <= r; ++o) {
            if (w[o + r] == 0.0) continue;
            std::array<int, 3> ix{i, j, k};
            ix[axis] += o;
            acc += w[o + r] * f.get(ix[0], ix[1], ix[2]);
        }
        out.v[static_cast<std::size_t>(out.idx(i, j, k))] = acc * inv_h;
    });
    return out;
}

Field component_field(const GridWavefunction& psi, int c) {
    return Field{psi.box(), psi.component(c)};
}

cplx pairwise_sum(const cplx* a, std::size_t n) {
    if (n <= 64) {
        cplx s{};
        for (std::size_t i = 0; i < n; ++i) s += a[i];
        return s;
    }
    std::size_t m = n / 2;
    return pairwise_sum(a, m) + pairwise_sum(a + m, n - m);
}

}  // namespace

// ---------------------------------------------------------------------------

GridWavefunction::GridWavefunction(const MomentumGrid& grid, int dim, IndexBox box)
    : grid_(&grid), dim_(dim), box_(box) {
    if (dim < 1) throw std::invalid_argument("wavefunction: dim must be positive");
    for (int d = 0; d < 3; ++d)
        if (!box.empty() && (box.lo[d] < 0 || box.hi[d] > grid.n())) throw std::invalid_argument("wavefunction: box outside grid");
    if (box_.empty()) box_ = IndexBox{};
    values_.assign(static_cast<std::size_t>(dim), std::vector<cplx>(static_cast<std::size_t>(box_.size())));
}

std::int64_t GridWavefunction::index(int i, int j, int k) const {
    return (std::int64_t(i - box_.lo[0]) * (box_.hi[1] - box_.lo[1]) + (j - box_.lo[1])) * (box_.hi[2] - box_.lo[2]) +
           (k - box_.lo[2]);
}

cplx GridWavefunction::at(int comp, int i, int j, int k) const {
    if (!box_.contains(i, j, k)) return {};
    return values_[static_cast<std::size_t>(comp)][static_cast<std::size_t>(index(i, j, k))];
}

cplx& GridWavefunction::ref(int comp, int i, int j, int k) {
    if (!box_.contains(i, j, k)) throw std::out_of_range("wavefunction: node outside the stored box");
    return values_[static_cast<std::size_t>(comp)][static_cast<std::size_t>(index(i, j, k))];
}

GridWavefunction GridWavefunction::widened(const IndexBox& b) const {
    if (!covers(b, box_)) throw std::invalid_argument("widened: new box must contain the old one");
    GridWavefunction out(*grid_, dim_, b);
    for (int c = 0; c < dim_; ++c)
        for_each_node(box_, [&](int i, int j, int k) { out.ref(c, i, j, k) = at(c, i, j, k); });
    return out;
}

GridWavefunction& GridWavefunction::operator+=(const GridWavefunction& o) {
    if (!grid_->same_as(*o.grid_) || dim_ != o.dim_) throw std::invalid_argument("wavefunction: grid or dim mismatch");
    if (!covers(box_, o.box_)) *this = widened(unite(box_, o.box_));
    for (int c = 0; c < dim_; ++c)
        for_each_node(o.box_, [&](int i, int j, int k) { ref(c, i, j, k) += o.at(c, i, j, k); });
    return *this;
}

GridWavefunction& GridWavefunction::operator-=(const GridWavefunction& o) {
    GridWavefunction neg = o;
    neg *= -1.0;
    return *this += neg;
}

GridWavefunction& GridWavefunction::operator*=(cplx s) {
    for (auto& comp : values_)
        for (auto& v : comp) v *= s;
    return *this;
}

bool GridWavefunction::all_finite() const {
    for (const auto& comp : values_)
        for (const auto& v : comp)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

// ---------------------------------------------------------------------------

GridWavefunction apply(const OperatorExpr& expr, const GridWavefunction& psi, Scheme scheme) {
    if (expr.dim() != psi.dim()) throw std::invalid_argument("apply: fiber dimension mismatch");
    const MomentumGrid& g = psi.grid();
    const int n = g.n();

    // Derivatives of conj/reflected input components, shared between terms.
    using FieldKey = std::tuple<int, int, std::array<int, 3>>;  // col, upsilon, deriv
    std::map<FieldKey, Field> cache;
    std::function<const Field&(int, int, const std::array<int, 3>&)> field_for =
        [&](int col, int upsilon, const std::array<int, 3>& deriv) -> const Field& {
        FieldKey key{col, upsilon, deriv};
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        Field f;
        if (deriv == std::array<int, 3>{0, 0, 0}) {
            f = component_field(psi, col);
            if (expr.antilinear())
                for (auto& v : f.v) v = std::conj(v);
            if (upsilon) f = reflect(f, n);
        } else {
            // peel one derivative off the highest axis
            std::array<int, 3> lower = deriv;
            int axis = deriv[2] ? 2 : (deriv[1] ? 1 : 0);
            --lower[axis];
            f = differentiate(field_for(col, upsilon, lower), axis, scheme, g);
        }
        return cache.emplace(key, std::move(f)).first->second;
    };

    struct Contribution {
        int row;
        Field f;
    };
    std::vector<Contribution> parts;
    IndexBox total;
    for (const auto& [key, coeff] : expr.terms()) {
        const Field& src = field_for(key.col, key.upsilon, key.deriv);
        CompiledFn c(coeff);
        Field out{src.box, std::vector<cplx>(src.v.size())};
        for_each_node(src.box, [&](int i, int j, int k) {
            auto s = static_cast<std::size_t>(src.idx(i, j, k));
            if (src.v[s] == cplx{}) return;
            if (g.excluded(i, j, k)) throw std::domain_error("apply: nonzero value on an excluded node");
            out.v[s] = c(g.coord(i), g.coord(j), g.coord(k)) * src.v[s];
        });
        total = unite(total, out.box);
        parts.push_back({key.row, std::move(out)});
    }

    GridWavefunction result(g, psi.dim(), total);
    for (const auto& part : parts)
        for_each_node(part.f.box, [&](int i, int j, int k) {
            result.ref(part.row, i, j, k) += part.f.v[static_cast<std::size_t>(part.f.idx(i, j, k))];
        });
    return result;
}

cplx inner_product(const GridWavefunction& phi, const GridWavefunction& psi) {
    if (!phi.grid().same_as(psi.grid()) || phi.dim() != psi.dim())
        throw std::invalid_argument("inner_product: grid or dim mismatch");
    const MomentumGrid& g = psi.grid();
    IndexBox b = intersect(phi.box(), psi.box());
    if (b.empty()) return {};
    std::vector<cplx> terms;
    terms.reserve(static_cast<std::size_t>(b.size() * psi.dim()));
    const double h3 = g.h() * g.h() * g.h();
    for (int c = 0; c < psi.dim(); ++c) {
        for_each_node(b, [&](int i, int j, int k) {
            double x = g.coord(i), y = g.coord(j), z = g.coord(k);
            double p0 = std::sqrt(x * x + y * y + z * z);
            terms.push_back(std::conj(phi.at(c, i, j, k)) * psi.at(c, i, j, k) * (h3 / p0));
        });
    }
    return pairwise_sum(terms.data(), terms.size());
}

double norm(const GridWavefunction& psi) { return std::sqrt(std::max(0.0, inner_product(psi, psi).real())); }

cplx expectation(const OperatorExpr& a, const GridWavefunction& psi, Scheme scheme) {
    return inner_product(psi, apply(a, psi, scheme)) / inner_product(psi, psi);
}

// ---------------------------------------------------------------------------

namespace {

double bump1(double x) {
    if (std::abs(x) >= 1.0) return 0.0;
    double u = 1.0 - x * x;
    double u2 = u * u, u4 = u2 * u2;
    return u4 * u4;
}

}  // namespace

GridWavefunction sample_bump(const MomentumGrid& grid, const Bump& b) {
    int dim = static_cast<int>(b.amplitude.size());
    IndexBox box;
    for (int d = 0; d < 3; ++d) {
        double lo = b.center[static_cast<std::size_t>(d)] - b.radius[static_cast<std::size_t>(d)];
        double hi = b.center[static_cast<std::size_t>(d)] + b.radius[static_cast<std::size_t>(d)];
        box.lo[d] = std::clamp(static_cast<int>(std::floor((lo + grid.params().half_width) / grid.h())), 0, grid.n());
        box.hi[d] = std::clamp(static_cast<int>(std::ceil((hi + grid.params().half_width) / grid.h())) + 1, 0, grid.n());
    }
    GridWavefunction psi(grid, dim, box);
    for_each_node(box, [&](int i, int j, int k) {
        std::array<double, 3> p{grid.coord(i), grid.coord(j), grid.coord(k)};
        double env = 1.0, phase = 0.0;
        for (std::size_t d = 0; d < 3; ++d) {
            env *= bump1((p[d] - b.center[d]) / b.radius[d]);
            phase += b.wave[d] * (p[d] - b.center[d]);
        }
        if (env == 0.0) return;
        cplx v = env * std::polar(1.0, phase);
        for (int c = 0; c < dim; ++c) psi.ref(c, i, j, k) = b.amplitude[static_cast<std::size_t>(c)] * v;
    });
    return psi;
}

Bump random_bump(const GridParams& params, int dim, int comp, std::mt19937_64& rng, double guard) {
    std::uniform_real_distribution<double> radius(0.35, 0.6), wave(-1.0, 1.0), unit(0.0, 1.0);
    for (int attempt = 0; attempt < 10000; ++attempt) {
        Bump b;
        bool ok = true;
        for (std::size_t d = 0; d < 3; ++d) {
            b.radius[d] = radius(rng);
            double room = params.half_width - b.radius[d] - guard;
            if (room <= 0) {
                ok = false;
                break;
            }
            b.center[d] = (2 * unit(rng) - 1) * room;
            b.wave[d] = wave(rng);
        }
        if (!ok) continue;
        // distance from the support box to the axis and the origin
        double dx = std::max(0.0, std::abs(b.center[0]) - b.radius[0]);
        double dy = std::max(0.0, std::abs(b.center[1]) - b.radius[1]);
        double dz = std::max(0.0, std::abs(b.center[2]) - b.radius[2]);
        if (std::sqrt(dx * dx + dy * dy) < params.rho_axis + guard) continue;
        if (std::sqrt(dx * dx + dy * dy + dz * dz) < params.rho_origin + guard) continue;
        b.amplitude.assign(static_cast<std::size_t>(dim), cplx{});
        for (int c = 0; c < dim; ++c) {
            if (comp >= 0 && c != comp) continue;
            b.amplitude[static_cast<std::size_t>(c)] =
                comp >= 0 ? cplx{1.0} : std::polar(0.5 + 0.5 * unit(rng), 2 * M_PI * unit(rng));
        }
        return b;
    }
    throw std::runtime_error("random_bump: box too small for the exclusions");
}

GridWavefunction numeric_residual(const Relation& r, const GridWavefunction& psi, Scheme scheme) {
    GridWavefunction out = apply(r.a, apply(r.b, psi, scheme), scheme);
    GridWavefunction ba = apply(r.b, apply(r.a, psi, scheme), scheme);
    ba *= static_cast<double>(r.sign);
    out -= ba;
    out -= apply(r.rhs, psi, scheme);
    return out;
}

ConvergenceResult convergence_study(const std::function<double(double)>& residual, const std::vector<double>& hs,
                                    double floor) {
    if (hs.size() < 3) throw std::invalid_argument("convergence_study: need at least three spacings");
    for (std::size_t i = 1; i < hs.size(); ++i)
        if (std::abs(hs[i] * 2 - hs[i - 1]) > 1e-12 * hs[i - 1])
            throw std::invalid_argument("convergence_study: each spacing must halve the previous one");
    ConvergenceResult res;
    res.h = hs;
    for (double h : hs) res.residual.push_back(residual(h));
    res.rounding_level = std::all_of(res.residual.begin(), res.residual.end(), [&](double r) { return r <= floor; });
    if (!res.rounding_level)
        for (std::size_t i = 1; i < hs.size(); ++i) res.orders.push_back(std::log2(res.residual[i - 1] / res.residual[i]));
    return res;
}

GridWavefunction numeric_helicity(const Tern& t, const GridWavefunction& psi, Scheme scheme) {
    GridWavefunction out(psi.grid(), psi.dim());
    for (int a = 1; a <= 3; ++a) {
        auto scaled = apply(OperatorExpr::multiply(t.dim, RationalFn::p(a) / RationalFn::p0()), psi, scheme);
        out += apply(t.j[static_cast<std::size_t>(a - 1)], scaled, scheme);
    }
    return out;
}

std::vector<Relation> numeric_relations(const Tern& t) {
    std::vector<Relation> rels = lie_relations(t);
    if (t.complete()) {
        auto d = discrete_relations(t);
        rels.insert(rels.end(), d.begin(), d.end());
        rels.push_back(mirror_relation(t));
    }
    return rels;
}

std::vector<RelationConvergence> cross_check(const Tern& t, const Bump& b, Scheme scheme, const std::vector<double>& hs,
                                             const GridParams& base, double floor) {
    auto rels = numeric_relations(t);
    // residual[h][relation], filled grid by grid so each grid is built once
    std::vector<std::vector<double>> table;
    for (double h : hs) {
        GridParams p = base;
        p.h = h;
        MomentumGrid g(p);
        GridWavefunction psi = sample_bump(g, b);
        double n0 = norm(psi);
        std::vector<double> row;
        for (const auto& r : rels) row.push_back(norm(numeric_residual(r, psi, scheme)) / n0);
        table.push_back(std::move(row));
    }
    std::vector<RelationConvergence> out;
    for (std::size_t i = 0; i < rels.size(); ++i) {
        std::size_t level = 0;
        auto cs = convergence_study([&](double) { return table[level++][i]; }, hs, floor);
        out.push_back({rels[i].id, cs});
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

template <typename T>
void put(std::ostream& os, T v) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    unsigned char bytes[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw std::runtime_error("load: truncated stream");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T v;
    std::memcpy(&v, bytes, sizeof(T));
    return v;
}

}  // namespace

void dump(const GridWavefunction& psi, std::ostream& os) {
    os.write("TGWF", 4);
    put<std::uint32_t>(os, 1);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(psi.dim()));
    put<std::int32_t>(os, psi.grid().n());
    put<double>(os, psi.grid().params().half_width);
    put<double>(os, psi.grid().h());
    for (int d = 0; d < 3; ++d) put<std::int32_t>(os, psi.box().lo[d]);
    for (int d = 0; d < 3; ++d) put<std::int32_t>(os, psi.box().hi[d]);
    for_each_node(psi.box(), [&](int i, int j, int k) {
        for (int c = 0; c < psi.dim(); ++c) {
            cplx v = psi.at(c, i, j, k);
            put<double>(os, v.real());
            put<double>(os, v.imag());
        }
    });
}

GridWavefunction load(const MomentumGrid& grid, std::istream& is) {
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "TGWF", 4) != 0) throw std::runtime_error("load: bad magic");
    if (get<std::uint32_t>(is) != 1) throw std::runtime_error("load: unsupported version");
    int dim = static_cast<int>(get<std::uint32_t>(is));
    int n = get<std::int32_t>(is);
    double hw = get<double>(is), h = get<double>(is);
    if (n != grid.n() || hw != grid.params().half_width || h != grid.h()) throw std::runtime_error("load: grid mismatch");
    IndexBox b;
    for (int d = 0; d < 3; ++d) b.lo[d] = get<std::int32_t>(is);
    for (int d = 0; d < 3; ++d) b.hi[d] = get<std::int32_t>(is);
    GridWavefunction psi(grid, dim, b);
    for_each_node(psi.box(), [&](int i, int j, int k) {
        for (int c = 0; c < dim; ++c) {
            double re = get<double>(is);
            double im = get<double>(is);
            psi.ref(c, i, j, k) = {re, im};
        }
    });
    return psi;
}

}  // namespace tern
