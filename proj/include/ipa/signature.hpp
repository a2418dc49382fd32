#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ipa/error.hpp"
#include "ipa/expr.hpp"

namespace ipa {

enum class SymbolClass { State, Input, Initial, Index, Predicate };

inline const char* to_string(SymbolClass c) {
    switch (c) {
    case SymbolClass::State: return "state";
    case SymbolClass::Input: return "input";
    case SymbolClass::Initial: return "initial";
    case SymbolClass::Index: return "index";
    case SymbolClass::Predicate: return "predicate";
    }
    return "?";
}

struct SymbolInfo {
    Sort sort;
    SymbolClass cls;
};

/// Declared symbols, partitioned by class.  Declaration order is kept so
/// that iteration over a class is deterministic and matches the source.
class Signature {
public:
    void declare(const std::string& name, Sort sort, SymbolClass cls) {
        if (symbols_.count(name)) {
            throw Error(ErrorCode::ValidationError, "symbol '" + name + "' declared twice");
        }
        if ((sort.kind == Sort::Func || sort.kind == Sort::Pred) && sort.arity < 1) {
            throw Error(ErrorCode::ArityMismatch, "symbol '" + name + "' needs arity >= 1");
        }
        symbols_.emplace(name, SymbolInfo{sort, cls});
        order_.push_back(name);
    }

    bool contains(const std::string& name) const { return symbols_.count(name) != 0; }

    std::optional<SymbolInfo> lookup(const std::string& name) const {
        auto it = symbols_.find(name);
        if (it == symbols_.end()) return std::nullopt;
        return it->second;
    }

    const SymbolInfo& at(const std::string& name) const {
        auto it = symbols_.find(name);
        if (it == symbols_.end()) throw Error(ErrorCode::UndeclaredSymbol, name);
        return it->second;
    }

    std::vector<std::string> of_class(SymbolClass cls) const {
        std::vector<std::string> out;
        for (const auto& n : order_) {
            if (symbols_.at(n).cls == cls) out.push_back(n);
        }
        return out;
    }

    std::set<std::string> set_of(SymbolClass cls) const {
        auto v = of_class(cls);
        return {v.begin(), v.end()};
    }

    const std::vector<std::string>& names() const { return order_; }

private:
    std::map<std::string, SymbolInfo> symbols_;
    std::vector<std::string> order_;
};

} // namespace ipa
