#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "fedsight/core.hpp"

namespace fedsight::gateway {

// Identifies one completion call within a backtest.
struct CallTag {
  std::string meeting_id;
  Stage stage = Stage::analyst;
  std::string agent_id;
  int run_index = 0;

  std::string to_string() const;  // "(2024-12-18, member_vote, member_1, 0)"
};

struct ChatMessage {
  enum class Role { user, assistant };
  Role role = Role::user;
  std::string text;
};

struct ChatRequest {
  std::string system_prompt;
  std::vector<ChatMessage> messages;
  int max_output_tokens = 1024;
  double temperature = 0.0;
  // Stable per-(meeting, run, stage) sub-seed, forwarded to providers that
  // accept a sampling seed; keeps live-mode output independent of the order
  // in which concurrent runs issue their calls. Scripted replay ignores it.
  std::uint64_t seed = 0;
  CallTag tag;

  // Everything the model would see, concatenated; used for token accounting
  // and the prompt-leak scan.
  std::string full_prompt_text() const;
};

struct ChatResponse {
  std::string text;
  long long prompt_tokens = 0;
  long long completion_tokens = 0;

  long long total_tokens() const { return prompt_tokens + completion_tokens; }
};

// ceil(characters / 4): coarse, monotone, deterministic. Provider-reported
// usage always wins when present.
long long approx_tokens(const std::string& text);

class Backend {
 public:
  virtual ~Backend() = default;
  virtual ChatResponse complete(const ChatRequest& request) = 0;
  virtual const char* name() const = 0;
};

// ---------------------------------------------------------------------------
// Scripted backend
// ---------------------------------------------------------------------------

struct FixtureEntry {
  std::string meeting_id;
  std::string stage;                  // stage_name() string
  std::string agent_id;
  std::optional<int> run_index;       // nullopt = wildcard "*"
  std::vector<std::string> responses;
};

// Deterministic replay backend. A call matches an entry by exact
// (meeting_id, stage, agent_id) plus run_index, preferring an exact
// run_index entry over a wildcard one. Within the matched entry, responses
// are consumed in order per tag: the first call with a given full tag takes
// index run_index (wildcard) or 0 (exact entry), repeat calls with the same
// full tag (e.g. a CoD retry) advance by one, and the index clamps to the
// last response so short lists serve any number of runs. Because the index
// depends only on the tag and the per-tag call count — never on arrival
// order across runs — concurrent replay stays deterministic.
class ScriptedBackend : public Backend {
 public:
  explicit ScriptedBackend(std::vector<FixtureEntry> entries);

  ChatResponse complete(const ChatRequest& request) override;
  const char* name() const override { return "scripted"; }

 private:
  struct Key {
    std::string meeting_id;
    std::string stage;
    std::string agent_id;
    std::optional<int> run_index;
    auto operator<=>(const Key&) const = default;
  };
  std::map<Key, const FixtureEntry*> index_;
  std::vector<FixtureEntry> entries_;
  std::map<std::string, int> repeat_counts_;  // full tag -> prior call count
  std::mutex mutex_;
};

std::vector<FixtureEntry> load_fixture(const std::filesystem::path& file);
void save_fixture(const std::filesystem::path& file,
                  const std::vector<FixtureEntry>& entries);

// ---------------------------------------------------------------------------
// Live backend
// ---------------------------------------------------------------------------

struct LiveConfig {
  std::string base_url;   // e.g. "https://api.example.com/v1"
  std::string api_key;
  std::string model;
  int concurrency_limit = 4;

  // Reads FEDSIGHT_API_BASE, FEDSIGHT_API_KEY, FEDSIGHT_MODEL; throws
  // ValidationError when a required variable is missing.
  static LiveConfig from_env();
};

// Chat-completions-style JSON POST adapter. At most `concurrency_limit`
// requests are in flight; waiting callers are released in arrival order.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(LiveConfig config);
  ~HttpBackend() override;

  ChatResponse complete(const ChatRequest& request) override;
  const char* name() const override { return "live"; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// ---------------------------------------------------------------------------
// Retry and the gateway facade
// ---------------------------------------------------------------------------

struct RetryPolicy {
  int max_attempts = 3;
  int base_backoff_ms = 500;  // doubled per retry
};

using Sleeper = std::function<void(int milliseconds)>;

// Runs `call`, retrying transport/429/5xx failures per the policy with
// exponential backoff. Non-retryable errors surface immediately; exhaustion
// rethrows the last error annotated with the attempt count.
ChatResponse with_retry(const std::function<ChatResponse()>& call,
                        const RetryPolicy& policy, const Sleeper& sleeper);

// The single entry point the rest of the system uses. Wraps a backend with
// retry, token accounting, and an observer hook that sees every request
// (used by the prompt-leak scan and token audits).
class Gateway {
 public:
  explicit Gateway(std::unique_ptr<Backend> backend, RetryPolicy policy = {},
                   Sleeper sleeper = nullptr);

  ChatResponse complete(const ChatRequest& request);

  const char* backend_name() const { return backend_->name(); }

  using RequestObserver =
      std::function<void(const ChatRequest&, const ChatResponse&)>;
  void set_request_observer(RequestObserver observer);

 private:
  std::unique_ptr<Backend> backend_;
  RetryPolicy policy_;
  Sleeper sleeper_;
  RequestObserver observer_;
  std::mutex observer_mutex_;
};

}  // namespace fedsight::gateway
