#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tidykg/game.hpp"
#include "tidykg/vocabulary.hpp"

namespace tidykg {

// Level parameterization: counts are drawn uniformly from these lists.
//   easy:   1 object / 1 to find / 1 room
//   medium: 2-3 objects / 1-3 to find / 1 room
//   hard:   6-7 objects / 5-7 to find / 1-2 rooms
struct LevelCounts {
    std::vector<int> objects;
    std::vector<int> to_find;
    std::vector<int> rooms;
};
LevelCounts level_counts(Level level);

// Deterministic in (level, vocab, seed, split). Throws DataError when the
// vocabulary cannot satisfy the sampled counts, naming the missing category.
GameSpec generate_game(Level level, const EntityVocabulary& vocab, std::uint64_t seed,
                       Split split);

// Scripted full-knowledge plan that tidies every misplaced object. Throws
// NumericError if the plan does not reach score 1.0 within max_steps (a
// generator bug by contract).
std::vector<Action> oracle_policy(const GameSpec& spec);

// Generate count games (seeds seed, seed+1, ...) into
// <out_dir>/<level>/<split>/<seed>.json. Returns the file paths.
std::vector<std::string> generate_games_to_dir(Level level, const EntityVocabulary& vocab,
                                               std::uint64_t first_seed, int count, Split split,
                                               const std::string& out_dir);

}  // namespace tidykg
