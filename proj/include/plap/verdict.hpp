#pragma once

#include <string_view>

namespace plap {

/// Sign classification of a discrete solution on interior nodes.
enum class Verdict { Positive, Negative, SignChanging, Zero, Diverged };

constexpr std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Positive: return "Positive";
        case Verdict::Negative: return "Negative";
        case Verdict::SignChanging: return "SignChanging";
        case Verdict::Zero: return "Zero";
        case Verdict::Diverged: return "Diverged";
    }
    return "?";
}

}  // namespace plap
