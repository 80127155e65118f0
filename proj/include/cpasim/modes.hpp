#ifndef CPASIM_MODES_HPP
#define CPASIM_MODES_HPP

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cpasim/errors.hpp"

namespace cpasim {

enum class ModeKind { optical, environment };

/**
 * Lightweight handle to a bosonic mode registered in a ModeRegistry.
 * Kind and label live in the registry; the handle is just the index,
 * so occupation vectors stay small and hashable.
 */
class ModeId {
public:
    ModeId() = default;
    explicit constexpr ModeId(std::uint32_t index) : index_(index) {}

    constexpr std::uint32_t index() const { return index_; }
    constexpr bool valid() const { return index_ != kInvalid; }

    auto operator<=>(const ModeId&) const = default;

private:
    static constexpr std::uint32_t kInvalid = 0xffffffffu;
    std::uint32_t index_ = kInvalid;
};

/**
 * Append-only registry of modes. Optical modes are declared up front when a
 * network is defined; environment modes are allocated by element dilation,
 * one or two per lossy element. Labels are unique; kind is fixed at
 * registration.
 */
class ModeRegistry {
public:
    ModeId add_optical(std::string label) { return add(ModeKind::optical, std::move(label)); }
    ModeId add_environment(std::string label) { return add(ModeKind::environment, std::move(label)); }

    std::size_t size() const { return entries_.size(); }
    bool contains(ModeId m) const { return m.valid() && m.index() < entries_.size(); }

    ModeKind kind(ModeId m) const { return entry(m).kind; }
    const std::string& label(ModeId m) const { return entry(m).label; }
    bool is_optical(ModeId m) const { return kind(m) == ModeKind::optical; }

    std::optional<ModeId> find(std::string_view label) const {
        auto it = by_label_.find(label);
        if (it == by_label_.end()) return std::nullopt;
        return ModeId(it->second);
    }

    std::vector<ModeId> optical_modes() const {
        std::vector<ModeId> out;
        for (std::uint32_t i = 0; i < entries_.size(); ++i)
            if (entries_[i].kind == ModeKind::optical) out.emplace_back(i);
        return out;
    }

private:
    struct Entry {
        ModeKind kind;
        std::string label;
    };

    ModeId add(ModeKind kind, std::string label) {
        if (by_label_.count(label))
            throw Error("mode label '" + label + "' already registered");
        const auto idx = static_cast<std::uint32_t>(entries_.size());
        by_label_.emplace(label, idx);
        entries_.push_back(Entry{kind, std::move(label)});
        return ModeId(idx);
    }

    const Entry& entry(ModeId m) const {
        if (!contains(m)) throw Error("mode not registered in this registry");
        return entries_[m.index()];
    }

    std::vector<Entry> entries_;
    std::map<std::string, std::uint32_t, std::less<>> by_label_;
};

} // namespace cpasim

#endif
