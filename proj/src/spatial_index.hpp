#pragma once

#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

#include <algorithm>
#include <utility>
#include <vector>

#include "nlt/core.hpp"

namespace nlt::detail {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

/// Static R-tree over a point set. Query results are returned sorted by
/// (distance, index) so callers see a deterministic order.
class PointIndex {
public:
    using BPoint = bg::model::point<double, 3, bg::cs::cartesian>;
    using Value = std::pair<BPoint, std::size_t>;

    PointIndex(int dim, const std::vector<Point>& points) : dim_(dim) {
        std::vector<Value> values;
        values.reserve(points.size());
        for (std::size_t k = 0; k < points.size(); ++k)
            values.emplace_back(BPoint(points[k][0], points[k][1], points[k][2]), k);
        tree_ = bgi::rtree<Value, bgi::rstar<16>>(values.begin(), values.end());
        points_ = &points;
    }

    /// k nearest points as (distance, index), nearest first.
    std::vector<std::pair<double, std::size_t>> knn(const Point& p, unsigned k) const {
        std::vector<Value> hits;
        tree_.query(bgi::nearest(BPoint(p[0], p[1], p[2]), k), std::back_inserter(hits));
        std::vector<std::pair<double, std::size_t>> out;
        out.reserve(hits.size());
        for (const auto& v : hits) out.emplace_back(norm(sub((*points_)[v.second], p), dim_), v.second);
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Indices of points with |q - p| < r, ascending.
    void within(const Point& p, double r, std::vector<std::size_t>& out) const {
        out.clear();
        bg::model::box<BPoint> box(BPoint(p[0] - r, p[1] - r, p[2] - r), BPoint(p[0] + r, p[1] + r, p[2] + r));
        std::vector<Value> hits;
        tree_.query(bgi::intersects(box), std::back_inserter(hits));
        for (const auto& v : hits)
            if (norm(sub((*points_)[v.second], p), dim_) < r) out.push_back(v.second);
        std::sort(out.begin(), out.end());
    }

private:
    int dim_;
    const std::vector<Point>* points_ = nullptr;
    bgi::rtree<Value, bgi::rstar<16>> tree_;
};

}  // namespace nlt::detail
