#include "greenxva/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "greenxva/error.hpp"

namespace greenxva::geom {

namespace {

constexpr long double kRelEps = 1e-12L;

// Guibas-Stolfi quad-edge store. Edge e belongs to quad e/4; e^2 is its
// reverse and rot(e) its dual.
class QuadEdges {
public:
    explicit QuadEdges(std::size_t reserve) {
        next_.reserve(4 * reserve);
        org_.reserve(4 * reserve);
        alive_.reserve(reserve);
    }

    static int rot(int e) { return (e & ~3) | ((e + 1) & 3); }
    static int sym(int e) { return e ^ 2; }
    static int inv_rot(int e) { return (e & ~3) | ((e + 3) & 3); }

    int onext(int e) const { return next_[static_cast<std::size_t>(e)]; }
    int oprev(int e) const { return rot(onext(rot(e))); }
    int lnext(int e) const { return rot(onext(inv_rot(e))); }
    int rprev(int e) const { return onext(sym(e)); }
    int org(int e) const { return org_[static_cast<std::size_t>(e)]; }
    int dest(int e) const { return org(sym(e)); }
    bool alive(int e) const { return alive_[static_cast<std::size_t>(e >> 2)] != 0; }
    int count() const { return static_cast<int>(next_.size()); }

    int make_edge(int a, int b) {
        const int q = count();
        next_.insert(next_.end(), {q, q + 3, q + 2, q + 1});
        org_.insert(org_.end(), {a, -1, b, -1});
        alive_.push_back(1);
        return q;
    }

    void splice(int a, int b) {
        const int alpha = rot(onext(a));
        const int beta = rot(onext(b));
        std::swap(next_[static_cast<std::size_t>(a)], next_[static_cast<std::size_t>(b)]);
        std::swap(next_[static_cast<std::size_t>(alpha)], next_[static_cast<std::size_t>(beta)]);
    }

    int connect(int a, int b) {
        const int e = make_edge(dest(a), org(b));
        splice(e, lnext(a));
        splice(sym(e), b);
        return e;
    }

    void remove(int e) {
        splice(e, oprev(e));
        splice(sym(e), oprev(sym(e)));
        alive_[static_cast<std::size_t>(e >> 2)] = 0;
    }

private:
    std::vector<int> next_;
    std::vector<int> org_;
    std::vector<char> alive_;
};

class Builder {
public:
    Builder(const std::vector<Point2>& pts, const std::vector<int>& order)
        : p_(pts), s_(order), q_(3 * order.size()) {}

    std::pair<int, int> run() { return build(0, static_cast<int>(s_.size())); }
    const QuadEdges& edges() const { return q_; }

private:
    const Point2& pt(int v) const { return p_[static_cast<std::size_t>(v)]; }
    bool ccw3(int a, int b, int c) const { return ccw(pt(a), pt(b), pt(c)); }
    bool right_of(int x, int e) const { return ccw3(x, q_.dest(e), q_.org(e)); }
    bool left_of(int x, int e) const { return ccw3(x, q_.org(e), q_.dest(e)); }

    std::pair<int, int> build(int lo, int hi) {
        const int n = hi - lo;
        const auto v = [&](int i) { return s_[static_cast<std::size_t>(lo + i)]; };
        if (n == 2) {
            const int a = q_.make_edge(v(0), v(1));
            return {a, QuadEdges::sym(a)};
        }
        if (n == 3) {
            const int a = q_.make_edge(v(0), v(1));
            const int b = q_.make_edge(v(1), v(2));
            q_.splice(QuadEdges::sym(a), b);
            if (ccw3(v(0), v(1), v(2))) {
                q_.connect(b, a);
                return {a, QuadEdges::sym(b)};
            }
            if (ccw3(v(0), v(2), v(1))) {
                const int c = q_.connect(b, a);
                return {QuadEdges::sym(c), c};
            }
            return {a, QuadEdges::sym(b)};
        }
        const int mid = lo + n / 2;
        auto [ldo, ldi] = build(lo, mid);
        auto [rdi, rdo] = build(mid, hi);
        for (;;) {
            if (left_of(q_.org(rdi), ldi)) {
                ldi = q_.lnext(ldi);
            } else if (right_of(q_.org(ldi), rdi)) {
                rdi = q_.rprev(rdi);
            } else {
                break;
            }
        }
        int basel = q_.connect(QuadEdges::sym(rdi), ldi);
        if (q_.org(ldi) == q_.org(ldo)) ldo = QuadEdges::sym(basel);
        if (q_.org(rdi) == q_.org(rdo)) rdo = basel;
        const auto valid = [&](int e) { return right_of(q_.dest(e), basel); };
        for (;;) {
            int lcand = q_.onext(QuadEdges::sym(basel));
            if (valid(lcand)) {
                while (in_circle(pt(q_.dest(basel)), pt(q_.org(basel)), pt(q_.dest(lcand)),
                                 pt(q_.dest(q_.onext(lcand))))) {
                    const int t = q_.onext(lcand);
                    q_.remove(lcand);
                    lcand = t;
                }
            }
            int rcand = q_.oprev(basel);
            if (valid(rcand)) {
                while (in_circle(pt(q_.dest(basel)), pt(q_.org(basel)), pt(q_.dest(rcand)),
                                 pt(q_.dest(q_.oprev(rcand))))) {
                    const int t = q_.oprev(rcand);
                    q_.remove(rcand);
                    rcand = t;
                }
            }
            const bool lv = valid(lcand);
            const bool rv = valid(rcand);
            if (!lv && !rv) break;
            if (!lv || (rv && in_circle(pt(q_.dest(lcand)), pt(q_.org(lcand)), pt(q_.org(rcand)),
                                        pt(q_.dest(rcand))))) {
                basel = q_.connect(rcand, QuadEdges::sym(basel));
            } else {
                basel = q_.connect(QuadEdges::sym(basel), QuadEdges::sym(lcand));
            }
        }
        return {ldo, rdo};
    }

    const std::vector<Point2>& p_;
    const std::vector<int>& s_;
    QuadEdges q_;
};

}  // namespace

double orient2d(const Point2& a, const Point2& b, const Point2& c) {
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

bool ccw(const Point2& a, const Point2& b, const Point2& c) {
    const long double bx = static_cast<long double>(b[0]) - a[0];
    const long double by = static_cast<long double>(b[1]) - a[1];
    const long double cx = static_cast<long double>(c[0]) - a[0];
    const long double cy = static_cast<long double>(c[1]) - a[1];
    const long double det = bx * cy - by * cx;
    const long double scale = std::fabs(bx * cy) + std::fabs(by * cx);
    return det > kRelEps * scale;
}

bool in_circle(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
    const long double ax = static_cast<long double>(a[0]) - d[0];
    const long double ay = static_cast<long double>(a[1]) - d[1];
    const long double bx = static_cast<long double>(b[0]) - d[0];
    const long double by = static_cast<long double>(b[1]) - d[1];
    const long double cx = static_cast<long double>(c[0]) - d[0];
    const long double cy = static_cast<long double>(c[1]) - d[1];
    const long double a2 = ax * ax + ay * ay;
    const long double b2 = bx * bx + by * by;
    const long double c2 = cx * cx + cy * cy;
    const long double t1 = a2 * (bx * cy - cx * by);
    const long double t2 = b2 * (cx * ay - ax * cy);
    const long double t3 = c2 * (ax * by - bx * ay);
    const long double det = t1 + t2 + t3;
    const long double scale = std::fabs(t1) + std::fabs(t2) + std::fabs(t3);
    return det > kRelEps * scale;
}

std::vector<Triangle> delaunay(const std::vector<Point2>& points) {
    std::vector<int> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return points[static_cast<std::size_t>(a)] < points[static_cast<std::size_t>(b)];
    });
    order.erase(std::unique(order.begin(), order.end(),
                            [&](int a, int b) {
                                return points[static_cast<std::size_t>(a)] ==
                                       points[static_cast<std::size_t>(b)];
                            }),
                order.end());
    if (order.size() < 3) throw GeometryError("delaunay: fewer than three distinct points");

    Builder builder(points, order);
    builder.run();
    const QuadEdges& q = builder.edges();

    std::vector<Triangle> tris;
    for (int e = 0; e < q.count(); ++e) {
        if ((e & 1) != 0 || !q.alive(e)) continue;
        const int e1 = q.lnext(e);
        const int e2 = q.lnext(e1);
        if (q.lnext(e2) != e || e > e1 || e > e2) continue;
        const int a = q.org(e), b = q.org(e1), c = q.org(e2);
        if (!ccw(points[static_cast<std::size_t>(a)], points[static_cast<std::size_t>(b)],
                 points[static_cast<std::size_t>(c)])) {
            continue;
        }
        tris.push_back({a, b, c});
    }
    if (tris.empty()) throw GeometryError("delaunay: all points are collinear");
    return tris;
}

}  // namespace greenxva::geom
