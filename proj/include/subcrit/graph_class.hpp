#pragma once
// Names for the builtin graph classes, shared by the class builders and the
// enumeration oracle.

#include <stdexcept>
#include <string>

namespace subcrit {

enum class graph_class { trees, cacti, outerplanar, sp };

inline const char* to_string(graph_class c) {
    switch (c) {
    case graph_class::trees: return "trees";
    case graph_class::cacti: return "cacti";
    case graph_class::outerplanar: return "outerplanar";
    case graph_class::sp: return "sp";
    }
    return "?";
}

inline graph_class graph_class_from(const std::string& s) {
    if (s == "trees") return graph_class::trees;
    if (s == "cacti") return graph_class::cacti;
    if (s == "outerplanar") return graph_class::outerplanar;
    if (s == "sp") return graph_class::sp;
    throw std::invalid_argument("unknown class: " + s);
}

} // namespace subcrit
