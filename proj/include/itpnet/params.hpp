#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "itpnet/tensor.hpp"

namespace itpnet {

/// Ordered, named collection of learnable tensors. Order is the canonical
/// parameter order used by the optimizer, gradient buffers and checkpoints.
class ParamStore {
public:
    std::size_t add(const std::string& name, Tensor t) {
        if (index_.count(name)) throw ConfigError("ParamStore: duplicate name " + name);
        index_[name] = names_.size();
        names_.push_back(name);
        tensors_.push_back(std::move(t));
        return names_.size() - 1;
    }

    std::size_t index_of(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw ConfigError("ParamStore: unknown name " + name);
        return it->second;
    }

    bool contains(const std::string& name) const { return index_.count(name) != 0; }

    Tensor& get(const std::string& name) { return tensors_[index_of(name)]; }
    const Tensor& get(const std::string& name) const { return tensors_[index_of(name)]; }
    Tensor& at(std::size_t i) { return tensors_[i]; }
    const Tensor& at(std::size_t i) const { return tensors_[i]; }
    const std::string& name(std::size_t i) const { return names_[i]; }

    std::size_t size() const { return names_.size(); }

    std::size_t scalar_count() const {
        std::size_t n = 0;
        for (const Tensor& t : tensors_) n += t.size();
        return n;
    }

    /// Zero tensors shaped like every parameter (a gradient buffer).
    std::vector<Tensor> zeros_like() const {
        std::vector<Tensor> out;
        out.reserve(tensors_.size());
        for (const Tensor& t : tensors_) out.emplace_back(t.rows(), t.cols());
        return out;
    }

private:
    std::vector<std::string> names_;
    std::vector<Tensor> tensors_;
    std::unordered_map<std::string, std::size_t> index_;
};

} // namespace itpnet
