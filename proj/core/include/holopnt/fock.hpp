#ifndef HOLOPNT_FOCK_HPP
#define HOLOPNT_FOCK_HPP

#include "holopnt/linalg.hpp"

#include <map>
#include <optional>
#include <vector>

namespace holopnt::fock {

// A register of bosonic modes plus optional two-level (hard-capped) modes.
// cutoff_per_boson_mode bounds each boson occupation when a truncated basis
// is required (non-number-conserving dynamics); layer enumeration ignores it.
struct ModeSystem {
    int boson_modes = 0;
    int two_level_modes = 0;
    std::optional<int> cutoff_per_boson_mode;

    int total_modes() const { return boson_modes + two_level_modes; }
    void validate() const;
    bool operator==(const ModeSystem&) const = default;
};

// Occupation-number state: boson occupations followed by two-level bits.
struct OccupationState {
    std::vector<int> occupations;

    int total_particles() const {
        int n = 0;
        for (int v : occupations) n += v;
        return n;
    }
    auto operator<=>(const OccupationState&) const = default;
};

std::string to_string(const OccupationState& s);

// An ordered, indexed set of occupation states over one ModeSystem.
// Layer bases hold a single total particle number; truncated and stacked
// bases hold several (graded by N).
class FockBasis {
public:
    FockBasis(ModeSystem system, std::vector<OccupationState> states);

    const ModeSystem& system() const { return system_; }
    const std::vector<OccupationState>& states() const { return states_; }
    std::size_t size() const { return states_.size(); }
    const OccupationState& state(std::size_t i) const { return states_[i]; }

    // Position of the state, or -1 when it is not in the basis.
    std::ptrdiff_t index_of(const OccupationState& s) const;

    bool is_single_layer() const;

private:
    ModeSystem system_;
    std::vector<OccupationState> states_;
    std::map<OccupationState, std::size_t> index_;
};

// All occupation states with total particle number `particles`, ordered
// descending-lexicographically (the state loading the leftmost mode first),
// which is graded-lexicographic over layers when bases are stacked.
FockBasis enumerate_layer(const ModeSystem& system, int particles);

// All states with every boson occupation <= cutoff (two-level bits free),
// graded by total N, then descending-lexicographic within a layer.
FockBasis enumerate_truncated(const ModeSystem& system);

// Concatenation of the layers 0..n_max in one basis (number-conserving
// models only need this for cross-layer frames and holonomies).
FockBasis stacked_layers(const ModeSystem& system, int n_max);

// Multiset coefficient C(n + k - 1, n): number of boson layer states.
std::size_t layer_size_bosons(int modes, int particles);

}  // namespace holopnt::fock

#endif
