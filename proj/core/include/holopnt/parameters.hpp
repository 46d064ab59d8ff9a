#ifndef HOLOPNT_PARAMETERS_HPP
#define HOLOPNT_PARAMETERS_HPP

#include "holopnt/linalg.hpp"

#include <map>
#include <string>
#include <vector>

namespace holopnt {

// Named real coordinates on the control manifold. Angles are radians;
// complex controls are split into a non-negative amplitude and a phase.
class ParameterPoint {
public:
    ParameterPoint() = default;
    ParameterPoint(std::initializer_list<std::pair<const std::string, double>> init)
        : values_(init) {}

    double get(const std::string& name) const {
        auto it = values_.find(name);
        if (it == values_.end()) throw InputError("unbound parameter: " + name);
        return it->second;
    }
    bool has(const std::string& name) const { return values_.count(name) != 0; }
    void set(const std::string& name, double value) { values_[name] = value; }

    ParameterPoint shifted(const std::string& name, double delta) const {
        ParameterPoint p = *this;
        p.set(name, p.get(name) + delta);
        return p;
    }

    const std::map<std::string, double>& values() const { return values_; }
    bool operator==(const ParameterPoint&) const = default;

private:
    std::map<std::string, double> values_;
};

}  // namespace holopnt

#endif
