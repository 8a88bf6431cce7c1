#pragma once

#include "pcrd/pointcloud.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace pcrd {

struct Neighbor {
    std::size_t index = 0;
    double squared_distance = 0;
};

// Exact nearest-neighbor search over point positions: k-d tree with median
// splits on the widest axis, leaf size 16. Results are exact, and equal
// distances resolve to the smallest point index so downstream metrics are
// deterministic. Immutable after build; concurrent queries are safe.
class NeighborIndex {
public:
    static NeighborIndex build(const PointCloud& cloud);

    Neighbor nearest(const Eigen::Vector3d& query) const;

    // The k exact nearest, ascending by (squared_distance, index).
    std::vector<Neighbor> nearest_k(const Eigen::Vector3d& query, std::size_t k) const;

    std::size_t size() const { return positions_.size(); }
    const Eigen::Vector3d& position(std::size_t i) const { return positions_[i]; }

private:
    struct Node {
        int axis = -1;  // -1 marks a leaf
        double split = 0;
        std::uint32_t a = 0, b = 0;  // children, or [a, b) into order_ for leaves
    };

    std::vector<Eigen::Vector3d> positions_;  // original order
    std::vector<std::uint32_t> order_;
    std::vector<Node> nodes_;

    std::uint32_t build_range(std::uint32_t begin, std::uint32_t end);
    void search(std::uint32_t node, const Eigen::Vector3d& q, Neighbor& best) const;

    struct KBuffer;
    void search_k(std::uint32_t node, const Eigen::Vector3d& q, KBuffer& buf) const;
};

}  // namespace pcrd
