#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "repsim/data_matrix.hpp"

namespace repsim {

/// Ordered per-layer activations measured on one probe set. Layer names are
/// the DataMatrix labels; order is network depth order.
class ActivationSet {
public:
    /// Throws InvalidInput on an empty layer list, duplicate or empty names,
    /// or layers with differing row counts.
    ActivationSet(std::vector<DataMatrix> layers, std::string probe_id);

    const std::vector<DataMatrix>& layers() const noexcept { return layers_; }
    const std::string& probe_id() const noexcept { return probe_id_; }
    std::size_t n_obs() const noexcept { return layers_.front().n_obs(); }
    std::size_t size() const noexcept { return layers_.size(); }
    std::vector<std::string> names() const;

    friend bool operator==(const ActivationSet& a, const ActivationSet& b) {
        if (a.probe_id_ != b.probe_id_ || a.layers_.size() != b.layers_.size()) return false;
        for (std::size_t i = 0; i < a.layers_.size(); ++i)
            if (a.layers_[i].label() != b.layers_[i].label() || !(a.layers_[i] == b.layers_[i]))
                return false;
        return true;
    }

private:
    std::vector<DataMatrix> layers_;
    std::string probe_id_;
};

}  // namespace repsim
