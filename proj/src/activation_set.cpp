#include "repsim/activation_set.hpp"

#include <set>

#include "repsim/error.hpp"

namespace repsim {

ActivationSet::ActivationSet(std::vector<DataMatrix> layers, std::string probe_id)
    : layers_(std::move(layers)), probe_id_(std::move(probe_id)) {
    if (layers_.empty()) throw InvalidInput("activation set has no layers");
    std::set<std::string> seen;
    for (const auto& layer : layers_) {
        if (layer.label().empty()) throw InvalidInput("activation set layer has an empty name");
        if (!seen.insert(layer.label()).second)
            throw InvalidInput("duplicate layer name '" + layer.label() + "'");
        if (layer.n_obs() != layers_.front().n_obs())
            throw InvalidInput("layer '" + layer.label() + "' has " +
                               std::to_string(layer.n_obs()) + " rows but '" +
                               layers_.front().label() + "' has " +
                               std::to_string(layers_.front().n_obs()));
    }
}

std::vector<std::string> ActivationSet::names() const {
    std::vector<std::string> out;
    out.reserve(layers_.size());
    for (const auto& layer : layers_) out.push_back(layer.label());
    return out;
}

}  // namespace repsim
