#include "holopnt/fock.hpp"

#include <algorithm>
#include <sstream>

namespace holopnt::fock {

void ModeSystem::validate() const {
    if (boson_modes < 0 || two_level_modes < 0 || total_modes() < 1) {
        throw ConfigError("ModeSystem needs at least one mode");
    }
    if (cutoff_per_boson_mode && *cutoff_per_boson_mode < 1) {
        throw ConfigError("boson cutoff must be >= 1");
    }
}

std::string to_string(const OccupationState& s) {
    std::ostringstream out;
    out << '|';
    for (std::size_t i = 0; i < s.occupations.size(); ++i) {
        if (i) out << ',';
        out << s.occupations[i];
    }
    out << '>';
    return out.str();
}

FockBasis::FockBasis(ModeSystem system, std::vector<OccupationState> states)
    : system_(std::move(system)), states_(std::move(states)) {
    system_.validate();
    for (std::size_t i = 0; i < states_.size(); ++i) {
        if (static_cast<int>(states_[i].occupations.size()) != system_.total_modes()) {
            throw ConfigError("occupation state has wrong mode count");
        }
        auto [it, inserted] = index_.emplace(states_[i], i);
        if (!inserted) throw ConfigError("duplicate state in basis: " + to_string(states_[i]));
    }
}

std::ptrdiff_t FockBasis::index_of(const OccupationState& s) const {
    auto it = index_.find(s);
    return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

bool FockBasis::is_single_layer() const {
    if (states_.empty()) return true;
    const int n = states_.front().total_particles();
    return std::all_of(states_.begin(), states_.end(),
                       [n](const OccupationState& s) { return s.total_particles() == n; });
}

namespace {

// Fills `out` with states of total `left` over modes [pos, end), leftmost
// mode taking the largest share first.
void enumerate_rec(const ModeSystem& sys, int pos, int left, OccupationState& scratch,
                   std::vector<OccupationState>& out) {
    const int modes = sys.total_modes();
    if (pos == modes) {
        if (left == 0) out.push_back(scratch);
        return;
    }
    const bool two_level = pos >= sys.boson_modes;
    const int hi = two_level ? std::min(left, 1) : left;
    for (int n = hi; n >= 0; --n) {
        scratch.occupations[pos] = n;
        enumerate_rec(sys, pos + 1, left - n, scratch, out);
    }
    scratch.occupations[pos] = 0;
}

}  // namespace

FockBasis enumerate_layer(const ModeSystem& system, int particles) {
    system.validate();
    if (particles < 0) throw ConfigError("particle number must be >= 0");
    std::vector<OccupationState> states;
    OccupationState scratch;
    scratch.occupations.assign(system.total_modes(), 0);
    enumerate_rec(system, 0, particles, scratch, states);
    return FockBasis(system, std::move(states));
}

FockBasis enumerate_truncated(const ModeSystem& system) {
    system.validate();
    if (!system.cutoff_per_boson_mode) {
        throw ConfigError("enumerate_truncated requires cutoff_per_boson_mode");
    }
    const int cutoff = *system.cutoff_per_boson_mode;
    const int n_max = cutoff * system.boson_modes + system.two_level_modes;
    std::vector<OccupationState> states;
    OccupationState scratch;
    scratch.occupations.assign(system.total_modes(), 0);
    for (int n = 0; n <= n_max; ++n) {
        std::vector<OccupationState> layer;
        enumerate_rec(system, 0, n, scratch, layer);
        for (auto& s : layer) {
            bool ok = true;
            for (int k = 0; k < system.boson_modes; ++k) {
                if (s.occupations[k] > cutoff) {
                    ok = false;
                    break;
                }
            }
            if (ok) states.push_back(std::move(s));
        }
    }
    return FockBasis(system, std::move(states));
}

FockBasis stacked_layers(const ModeSystem& system, int n_max) {
    system.validate();
    if (n_max < 0) throw ConfigError("n_max must be >= 0");
    std::vector<OccupationState> states;
    for (int n = 0; n <= n_max; ++n) {
        auto layer = enumerate_layer(system, n);
        states.insert(states.end(), layer.states().begin(), layer.states().end());
    }
    return FockBasis(system, std::move(states));
}

std::size_t layer_size_bosons(int modes, int particles) {
    // C(particles + modes - 1, particles) without overflow at desk scale.
    std::size_t result = 1;
    for (int k = 1; k <= modes - 1; ++k) {
        result = result * (particles + k) / k;
    }
    return result;
}

}  // namespace holopnt::fock
