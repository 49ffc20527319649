#include "fedsight/gateway.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "fedsight/errors.hpp"
#include "fedsight/log.hpp"

namespace fedsight::gateway {

namespace {
using nlohmann::json;
}

std::string CallTag::to_string() const {
  return "(" + meeting_id + ", " + stage_name(stage) + ", " + agent_id + ", " +
         std::to_string(run_index) + ")";
}

std::string ChatRequest::full_prompt_text() const {
  std::string text = system_prompt;
  for (const auto& message : messages) {
    text += '\n';
    text += message.text;
  }
  return text;
}

long long approx_tokens(const std::string& text) {
  return static_cast<long long>((text.size() + 3) / 4);
}

// ---------------------------------------------------------------------------
// Scripted backend
// ---------------------------------------------------------------------------

ScriptedBackend::ScriptedBackend(std::vector<FixtureEntry> entries)
    : entries_(std::move(entries)) {
  for (const auto& entry : entries_) {
    if (entry.responses.empty()) {
      throw ValidationError("fixture entry for (" + entry.meeting_id + ", " +
                            entry.stage + ", " + entry.agent_id +
                            ") has no responses");
    }
    Key key{entry.meeting_id, entry.stage, entry.agent_id, entry.run_index};
    auto [it, inserted] = index_.emplace(key, &entry);
    (void)it;
    if (!inserted) {
      throw ValidationError("duplicate fixture entry for (" + entry.meeting_id +
                            ", " + entry.stage + ", " + entry.agent_id + ")");
    }
  }
}

ChatResponse ScriptedBackend::complete(const ChatRequest& request) {
  const CallTag& tag = request.tag;
  const std::string stage = stage_name(tag.stage);

  const FixtureEntry* entry = nullptr;
  bool wildcard = false;
  {
    auto exact = index_.find(Key{tag.meeting_id, stage, tag.agent_id, tag.run_index});
    if (exact != index_.end()) {
      entry = exact->second;
    } else {
      auto wild = index_.find(Key{tag.meeting_id, stage, tag.agent_id, std::nullopt});
      if (wild != index_.end()) {
        entry = wild->second;
        wildcard = true;
      }
    }
  }
  if (entry == nullptr) throw FixtureMissError(tag.to_string());

  int repeats = 0;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    repeats = repeat_counts_[tag.to_string()]++;
  }
  std::size_t base = wildcard ? static_cast<std::size_t>(tag.run_index) : 0;
  std::size_t idx =
      std::min(base + static_cast<std::size_t>(repeats), entry->responses.size() - 1);

  ChatResponse response;
  response.text = entry->responses[idx];
  response.prompt_tokens = approx_tokens(request.full_prompt_text());
  response.completion_tokens = approx_tokens(response.text);
  return response;
}

std::vector<FixtureEntry> load_fixture(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open fixture " + file.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ParseError(file.filename().string() + ": invalid JSON at byte " +
                     std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_array()) {
    throw ParseError(file.filename().string() + ": fixture must be a JSON array");
  }
  std::vector<FixtureEntry> entries;
  for (const auto& item : doc) {
    FixtureEntry entry;
    entry.meeting_id = item.value("meeting_id", "");
    entry.stage = item.value("stage", "");
    entry.agent_id = item.value("agent_id", "");
    if (entry.meeting_id.empty() || entry.stage.empty() || entry.agent_id.empty()) {
      throw ParseError(file.filename().string() +
                       ": fixture entry missing meeting_id/stage/agent_id");
    }
    if (!item.contains("run_index")) {
      throw ParseError(file.filename().string() + ": fixture entry for (" +
                       entry.meeting_id + ", " + entry.stage +
                       ") missing run_index");
    }
    const auto& run = item["run_index"];
    if (run.is_string()) {
      if (run.get<std::string>() != "*") {
        throw ParseError(file.filename().string() +
                         ": run_index must be an integer or \"*\"");
      }
      entry.run_index = std::nullopt;
    } else if (run.is_number_integer()) {
      entry.run_index = run.get<int>();
    } else {
      throw ParseError(file.filename().string() +
                       ": run_index must be an integer or \"*\"");
    }
    if (!item.contains("responses") || !item["responses"].is_array() ||
        item["responses"].empty()) {
      throw ParseError(file.filename().string() + ": fixture entry for (" +
                       entry.meeting_id + ", " + entry.stage +
                       ") needs a non-empty responses array");
    }
    for (const auto& r : item["responses"]) {
      if (!r.is_string()) {
        throw ParseError(file.filename().string() + ": responses must be strings");
      }
      entry.responses.push_back(r.get<std::string>());
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

void save_fixture(const std::filesystem::path& file,
                  const std::vector<FixtureEntry>& entries) {
  json doc = json::array();
  for (const auto& entry : entries) {
    json item;
    item["meeting_id"] = entry.meeting_id;
    item["stage"] = entry.stage;
    item["agent_id"] = entry.agent_id;
    if (entry.run_index.has_value()) {
      item["run_index"] = *entry.run_index;
    } else {
      item["run_index"] = "*";
    }
    item["responses"] = entry.responses;
    doc.push_back(item);
  }
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write fixture " + file.string());
  out << doc.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Live backend
// ---------------------------------------------------------------------------

LiveConfig LiveConfig::from_env() {
  auto read = [](const char* var) -> std::string {
    const char* value = std::getenv(var);
    return value == nullptr ? "" : value;
  };
  LiveConfig config;
  config.base_url = read("FEDSIGHT_API_BASE");
  config.api_key = read("FEDSIGHT_API_KEY");
  config.model = read("FEDSIGHT_MODEL");
  if (config.base_url.empty() || config.api_key.empty() || config.model.empty()) {
    throw ValidationError(
        "live backend needs FEDSIGHT_API_BASE, FEDSIGHT_API_KEY and "
        "FEDSIGHT_MODEL set");
  }
  return config;
}

}  // namespace fedsight::gateway

// httplib is header-only and heavy; keep it confined to this translation unit.
#include <httplib.h>

namespace fedsight::gateway {

namespace {

// FIFO admission gate: at most `limit` holders at once, waiters released in
// ticket order so no caller starves.
class FairGate {
 public:
  explicit FairGate(int limit) : limit_(limit) {}

  void acquire() {
    std::unique_lock<std::mutex> lock(mutex_);
    const std::uint64_t ticket = next_ticket_++;
    cv_.wait(lock, [&] {
      return ticket < served_ + static_cast<std::uint64_t>(limit_);
    });
  }

  void release() {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      ++served_;
    }
    cv_.notify_all();
  }

 private:
  const int limit_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::uint64_t next_ticket_ = 0;
  std::uint64_t served_ = 0;
};

struct GateHold {
  explicit GateHold(FairGate& gate) : gate_(gate) { gate_.acquire(); }
  ~GateHold() { gate_.release(); }
  FairGate& gate_;
};

// "https://host[:port]/path" -> (scheme://host[:port], /path)
std::pair<std::string, std::string> split_base_url(const std::string& base_url) {
  std::size_t scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw ValidationError("base URL must include a scheme: " + base_url);
  }
  std::size_t path_start = base_url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {base_url, ""};
  std::string host = base_url.substr(0, path_start);
  std::string path = base_url.substr(path_start);
  while (!path.empty() && path.back() == '/') path.pop_back();
  return {host, path};
}

}  // namespace

struct HttpBackend::Impl {
  LiveConfig config;
  FairGate gate;
  std::string host;
  std::string path_prefix;

  explicit Impl(LiveConfig cfg)
      : config(std::move(cfg)), gate(config.concurrency_limit) {
    if (config.concurrency_limit < 1) {
      throw ValidationError("concurrency limit must be positive");
    }
    std::tie(host, path_prefix) = split_base_url(config.base_url);
  }
};

HttpBackend::HttpBackend(LiveConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}

HttpBackend::~HttpBackend() = default;

ChatResponse HttpBackend::complete(const ChatRequest& request) {
  GateHold hold(impl_->gate);

  json body;
  body["model"] = impl_->config.model;
  json messages = json::array();
  if (!request.system_prompt.empty()) {
    messages.push_back({{"role", "system"}, {"content", request.system_prompt}});
  }
  for (const auto& message : request.messages) {
    messages.push_back(
        {{"role", message.role == ChatMessage::Role::user ? "user" : "assistant"},
         {"content", message.text}});
  }
  body["messages"] = messages;
  body["max_tokens"] = request.max_output_tokens;
  body["temperature"] = request.temperature;
  if (request.seed != 0) body["seed"] = request.seed;

  httplib::Client client(impl_->host);
  client.set_connection_timeout(30);
  client.set_read_timeout(120);
  httplib::Headers headers = {
      {"Authorization", "Bearer " + impl_->config.api_key}};

  auto result = client.Post(impl_->path_prefix + "/chat/completions", headers,
                            body.dump(), "application/json");
  if (!result) {
    throw GatewayError("transport failure for " + request.tag.to_string() + ": " +
                           httplib::to_string(result.error()),
                       0, true);
  }
  if (result->status < 200 || result->status >= 300) {
    bool retryable = result->status == 429 || result->status >= 500;
    throw GatewayError("HTTP " + std::to_string(result->status) + " for " +
                           request.tag.to_string(),
                       result->status, retryable);
  }

  json doc;
  try {
    doc = json::parse(result->body);
  } catch (const json::parse_error& e) {
    throw GatewayError("unparseable provider response for " +
                           request.tag.to_string() + ": " + e.what(),
                       0, false);
  }
  ChatResponse response;
  try {
    response.text = doc.at("choices").at(0).at("message").at("content")
                        .get<std::string>();
  } catch (const json::exception&) {
    throw GatewayError("provider response missing choices[0].message.content for " +
                           request.tag.to_string(),
                       0, false);
  }
  if (doc.contains("usage") && doc["usage"].is_object()) {
    response.prompt_tokens = doc["usage"].value("prompt_tokens", 0LL);
    response.completion_tokens = doc["usage"].value("completion_tokens", 0LL);
  }
  if (response.prompt_tokens <= 0) {
    response.prompt_tokens = approx_tokens(request.full_prompt_text());
  }
  if (response.completion_tokens <= 0) {
    response.completion_tokens = approx_tokens(response.text);
  }
  return response;
}

// ---------------------------------------------------------------------------
// Retry and facade
// ---------------------------------------------------------------------------

ChatResponse with_retry(const std::function<ChatResponse()>& call,
                        const RetryPolicy& policy, const Sleeper& sleeper) {
  int attempt = 0;
  int backoff_ms = policy.base_backoff_ms;
  while (true) {
    ++attempt;
    try {
      return call();
    } catch (GatewayError& e) {
      e.set_attempts(attempt);
      if (!e.retryable() || attempt >= policy.max_attempts) throw;
      log_warn(std::string("gateway retry after attempt ") +
               std::to_string(attempt) + ": " + e.what());
      if (sleeper) {
        sleeper(backoff_ms);
      } else {
        std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      }
      backoff_ms *= 2;
    }
  }
}

Gateway::Gateway(std::unique_ptr<Backend> backend, RetryPolicy policy,
                 Sleeper sleeper)
    : backend_(std::move(backend)),
      policy_(policy),
      sleeper_(std::move(sleeper)) {
  if (backend_ == nullptr) throw ValidationError("gateway needs a backend");
}

ChatResponse Gateway::complete(const ChatRequest& request) {
  ChatResponse response = with_retry(
      [&] { return backend_->complete(request); }, policy_, sleeper_);
  {
    std::lock_guard<std::mutex> lock(observer_mutex_);
    if (observer_) observer_(request, response);
  }
  return response;
}

void Gateway::set_request_observer(RequestObserver observer) {
  std::lock_guard<std::mutex> lock(observer_mutex_);
  observer_ = std::move(observer);
}

}  // namespace fedsight::gateway
