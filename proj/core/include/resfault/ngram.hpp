#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace resfault {

inline constexpr const char* kBeginToken = "<s>";
inline constexpr const char* kEndToken = "</s>";
inline constexpr const char* kUnkToken = "<unk>";

// Lexical tokens (identifiers, literals, operators, keywords); whitespace
// and comments dropped; wrapped in begin/end sentinels.
std::vector<std::string> tokenize_for_lm(std::string_view source);

// Add-k smoothed n-gram model with an UNK token. probability() is the
// normalized add-k estimate; cross_entropy() additionally clamps per-token
// surprisal at log2(|V|+1) so ENT always lies in [0, log2(|V|+1)].
class NgramModel {
public:
    NgramModel() = default;

    static NgramModel train(const std::vector<std::vector<std::string>>& corpus, int order,
                            double add_k);

    double probability(const std::vector<std::string>& context, const std::string& token) const;
    // bits per token over tokens[1..]; each token conditioned on up to
    // order-1 predecessors
    double cross_entropy(const std::vector<std::string>& tokens) const;

    int order() const { return order_; }
    double add_k() const { return k_; }
    std::size_t vocab_size() const { return vocab_.size(); }

    std::string serialize() const;
    static NgramModel deserialize(const std::string& text);

private:
    int order_ = 3;
    double k_ = 0.01;
    std::set<std::string> vocab_;
    std::map<std::string, std::map<std::string, std::int64_t>> counts_;  // ctx -> next -> n
    std::map<std::string, std::int64_t> context_totals_;

    std::string context_key(const std::vector<std::string>& context, std::size_t take) const;
};

}  // namespace resfault
