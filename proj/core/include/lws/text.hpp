#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lws {

/// Lowercases, splits on whitespace, and separates ASCII punctuation into
/// standalone tokens. Idempotent: tokenize(join_tokens(t)) == t.
std::vector<std::string> tokenize(std::string_view text);

std::string join_tokens(std::span<const std::string> tokens);

}  // namespace lws
