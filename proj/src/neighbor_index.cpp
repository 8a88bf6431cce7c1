#include "pcrd/neighbor_index.hpp"

#include "pcrd/errors.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace pcrd {

namespace {

constexpr std::uint32_t kLeafSize = 16;

bool closer(double d, std::size_t i, const Neighbor& than) {
    return d < than.squared_distance || (d == than.squared_distance && i < than.index);
}

}  // namespace

// Bounded buffer of the k best candidates, ordered worst-first at [0].
struct NeighborIndex::KBuffer {
    std::vector<Neighbor> heap;  // max-heap by (distance, index)
    std::size_t k;

    explicit KBuffer(std::size_t k) : k(k) { heap.reserve(k); }

    static bool heap_less(const Neighbor& x, const Neighbor& y) {
        return x.squared_distance < y.squared_distance ||
               (x.squared_distance == y.squared_distance && x.index < y.index);
    }

    double prune_radius() const {
        return heap.size() < k ? std::numeric_limits<double>::infinity()
                               : heap.front().squared_distance;
    }

    void offer(double d, std::size_t i) {
        if (heap.size() < k) {
            heap.push_back({i, d});
            std::push_heap(heap.begin(), heap.end(), heap_less);
        } else if (closer(d, i, heap.front())) {
            std::pop_heap(heap.begin(), heap.end(), heap_less);
            heap.back() = {i, d};
            std::push_heap(heap.begin(), heap.end(), heap_less);
        }
    }
};

NeighborIndex NeighborIndex::build(const PointCloud& cloud) {
    if (cloud.size() == 0) throw InternalError("neighbor index over an empty cloud");

    NeighborIndex idx;
    idx.positions_.reserve(cloud.size());
    for (const auto& p : cloud.points) idx.positions_.push_back(p.position);
    idx.order_.resize(cloud.size());
    std::iota(idx.order_.begin(), idx.order_.end(), 0u);
    idx.nodes_.reserve(2 * cloud.size() / kLeafSize + 2);
    idx.build_range(0, static_cast<std::uint32_t>(cloud.size()));
    return idx;
}

std::uint32_t NeighborIndex::build_range(std::uint32_t begin, std::uint32_t end) {
    const std::uint32_t id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
    if (end - begin <= kLeafSize) {
        nodes_[id] = {-1, 0, begin, end};
        return id;
    }

    Eigen::Vector3d lo = positions_[order_[begin]], hi = lo;
    for (std::uint32_t i = begin + 1; i < end; ++i) {
        lo = lo.cwiseMin(positions_[order_[i]]);
        hi = hi.cwiseMax(positions_[order_[i]]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);

    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t x, std::uint32_t y) {
                         const double px = positions_[x][axis], py = positions_[y][axis];
                         return px < py || (px == py && x < y);
                     });
    const double split = positions_[order_[mid]][axis];

    const std::uint32_t left = build_range(begin, mid);
    const std::uint32_t right = build_range(mid, end);
    nodes_[id] = {axis, split, left, right};
    return id;
}

void NeighborIndex::search(std::uint32_t node, const Eigen::Vector3d& q, Neighbor& best) const {
    const Node& n = nodes_[node];
    if (n.axis < 0) {
        for (std::uint32_t i = n.a; i < n.b; ++i) {
            const std::uint32_t p = order_[i];
            const double d = (positions_[p] - q).squaredNorm();
            if (closer(d, p, best)) best = {p, d};
        }
        return;
    }
    const double delta = q[n.axis] - n.split;
    const std::uint32_t near = delta < 0 ? n.a : n.b;
    const std::uint32_t far = delta < 0 ? n.b : n.a;
    search(near, q, best);
    // <= keeps equal-distance candidates reachable so index tie-breaks stay exact
    if (delta * delta <= best.squared_distance) search(far, q, best);
}

Neighbor NeighborIndex::nearest(const Eigen::Vector3d& query) const {
    Neighbor best{std::numeric_limits<std::size_t>::max(),
                  std::numeric_limits<double>::infinity()};
    search(0, query, best);
    return best;
}

void NeighborIndex::search_k(std::uint32_t node, const Eigen::Vector3d& q, KBuffer& buf) const {
    const Node& n = nodes_[node];
    if (n.axis < 0) {
        for (std::uint32_t i = n.a; i < n.b; ++i) {
            const std::uint32_t p = order_[i];
            buf.offer((positions_[p] - q).squaredNorm(), p);
        }
        return;
    }
    const double delta = q[n.axis] - n.split;
    const std::uint32_t near = delta < 0 ? n.a : n.b;
    const std::uint32_t far = delta < 0 ? n.b : n.a;
    search_k(near, q, buf);
    if (delta * delta <= buf.prune_radius()) search_k(far, q, buf);
}

std::vector<Neighbor> NeighborIndex::nearest_k(const Eigen::Vector3d& query, std::size_t k) const {
    if (k < 1 || k > size())
        throw InternalError("nearest_k: k=" + std::to_string(k) + " outside [1, " +
                            std::to_string(size()) + "]");
    KBuffer buf(k);
    search_k(0, query, buf);
    std::vector<Neighbor> out = std::move(buf.heap);
    std::sort(out.begin(), out.end(), KBuffer::heap_less);
    return out;
}

}  // namespace pcrd
