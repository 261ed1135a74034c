#pragma once

#include <string>
#include <utility>
#include <vector>

#include "matrix.hpp"

namespace mgcn {

/// Everything needed to restore a trained model: the resolved run
/// configuration (JSON), parameter tensors in model order, optimizer
/// moments, and the optional feature standardizer. Binary little-endian,
/// byte-stable for identical contents.
struct Checkpoint {
    std::string config_json;
    std::vector<std::pair<std::string, Matrix>> tensors;
    bool has_adam = false;
    long long adam_step = 0;
    std::vector<Matrix> adam_m;
    std::vector<Matrix> adam_v;
    std::vector<double> feature_mean;  // empty when standardization is off
    std::vector<double> feature_std;
};

void write_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint read_checkpoint(const std::string& path);

}  // namespace mgcn
