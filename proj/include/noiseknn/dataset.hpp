#pragma once

// A dataset is a list of (point, response) pairs with every point of the
// same kind (and, for vectors, the same dimension). Responses live in
// [0,1]; binary {0,1} responses unlock the exact integer fast paths in the
// sup/inf estimators, so we detect that once up front.

#include <cstddef>
#include <utility>
#include <vector>

#include "noiseknn/error.hpp"
#include "noiseknn/point.hpp"

namespace noiseknn {

class Dataset {
  public:
    Dataset() = default;

    Dataset(std::vector<Point> points, std::vector<double> responses)
        : points_(std::move(points)), responses_(std::move(responses)) {
        if (points_.empty()) throw data_error("dataset is empty");
        if (points_.size() != responses_.size())
            throw data_error("dataset has mismatched point/response counts");
        const PointKind k = kind(points_.front());
        std::size_t dim = 0;
        if (k == PointKind::real_vector)
            dim = std::get<RealVector>(points_.front()).size();
        binary_ = true;
        for (std::size_t i = 0; i < points_.size(); ++i) {
            validate_point(points_[i]);
            if (kind(points_[i]) != k)
                throw data_error("dataset mixes point kinds");
            if (k == PointKind::real_vector &&
                std::get<RealVector>(points_[i]).size() != dim)
                throw data_error("dataset mixes vector dimensions");
            const double z = responses_[i];
            if (!(z >= 0.0) || !(z <= 1.0))
                throw data_error("dataset response outside [0,1]");
            if (z != 0.0 && z != 1.0) binary_ = false;
        }
        kind_ = k;
        dim_ = dim;
    }

    std::size_t size() const { return points_.size(); }
    const std::vector<Point>& points() const { return points_; }
    const std::vector<double>& responses() const { return responses_; }
    const Point& point(std::size_t i) const { return points_[i]; }
    double response(std::size_t i) const { return responses_[i]; }
    PointKind point_kind() const { return kind_; }
    std::size_t dimension() const { return dim_; }  // 0 unless vectors
    bool binary_responses() const { return binary_; }

    // Same points, responses mapped z -> 1-z. Exact in IEEE arithmetic for
    // binary responses; used to compute infima through the sup estimator.
    Dataset complemented() const {
        std::vector<double> flipped(responses_.size());
        for (std::size_t i = 0; i < responses_.size(); ++i)
            flipped[i] = 1.0 - responses_[i];
        Dataset out;
        out.points_ = points_;
        out.responses_ = std::move(flipped);
        out.kind_ = kind_;
        out.dim_ = dim_;
        out.binary_ = binary_;
        return out;
    }

  private:
    std::vector<Point> points_;
    std::vector<double> responses_;
    PointKind kind_ = PointKind::real_vector;
    std::size_t dim_ = 0;
    bool binary_ = true;
};

// Coupled label view used by classification: labels must be exactly 0/1.
inline void require_binary(const Dataset& data, const char* what) {
    if (!data.binary_responses())
        throw data_error(std::string(what) + " requires binary 0/1 responses");
}

}  // namespace noiseknn
