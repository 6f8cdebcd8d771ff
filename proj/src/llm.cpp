#include "docbias/llm.hpp"

#include <atomic>
#include <cctype>
#include <mutex>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace docbias {

using nlohmann::json;

std::string build_llm_prompt(const std::string& title,
                             const std::string& article,
                             const std::vector<std::string>& labels) {
  std::string prompt =
      "Please classify the following news article by its political bias. "
      "Please only classify the article as ";
  prompt += join(labels, ", ");
  prompt += ", and return no other text.\n";
  prompt += "title: " + title + "\n";
  prompt += "article: " + article + "\n";
  prompt += "bias: ";
  return prompt;
}

std::string parse_llm_label(const std::string& response,
                            const std::vector<std::string>& labels) {
  std::size_t b = 0, e = response.size();
  auto strippable = [](unsigned char c) {
    return std::isspace(c) || std::ispunct(c);
  };
  while (b < e && strippable(static_cast<unsigned char>(response[b]))) ++b;
  while (e > b && strippable(static_cast<unsigned char>(response[e - 1]))) --e;
  std::string core = lower_ascii(response.substr(b, e - b));
  for (const auto& label : labels) {
    if (core == lower_ascii(label)) return label;
  }
  return "";
}

namespace {

struct CacheEntry {
  std::string response;
  std::string label;
};

std::map<std::string, CacheEntry> load_cache(const std::string& path) {
  std::map<std::string, CacheEntry> cache;
  if (path.empty() || !file_exists(path)) return cache;
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception&) {
    return cache;  // unreadable cache is treated as empty
  }
  if (!j.contains("entries") || !j["entries"].is_object()) return cache;
  for (const auto& [key, value] : j["entries"].items()) {
    CacheEntry entry;
    entry.response = value.value("response", "");
    entry.label = value.value("label", "");
    cache[key] = std::move(entry);
  }
  return cache;
}

void save_cache(const std::string& path,
                const std::map<std::string, CacheEntry>& cache) {
  if (path.empty()) return;
  json entries = json::object();
  for (const auto& [key, entry] : cache) {
    entries[key] = {{"response", entry.response}, {"label", entry.label}};
  }
  json j;
  j["entries"] = std::move(entries);
  write_file(path, j.dump(2) + "\n");
}

struct UrlParts {
  std::string base;  // scheme://host:port
  std::string path;
};

UrlParts split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("endpoint URL needs a scheme: " + url);
  }
  std::string scheme = url.substr(0, scheme_end);
  if (scheme == "https") {
    throw ConfigError(
        "https endpoints are not supported by this build; use an http "
        "endpoint or a local proxy");
  }
  if (scheme != "http") {
    throw ConfigError("unsupported endpoint scheme '" + scheme + "'");
  }
  auto path_pos = url.find('/', scheme_end + 3);
  UrlParts parts;
  if (path_pos == std::string::npos) {
    parts.base = url;
    parts.path = "/";
  } else {
    parts.base = url.substr(0, path_pos);
    parts.path = url.substr(path_pos);
  }
  return parts;
}

}  // namespace

std::vector<LlmPrediction> llm_classify(
    const LlmConfig& cfg, const std::vector<LlmArticle>& articles) {
  if (cfg.labels.empty()) throw ConfigError("llm baseline needs a label set");
  UrlParts url = split_url(cfg.endpoint);

  auto cache = load_cache(cfg.cache_path);
  std::vector<LlmPrediction> results(articles.size());

  // resolve cache hits up front; queue the rest
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < articles.size(); ++i) {
    const auto& a = articles[i];
    results[i].id = a.id;
    results[i].true_label = a.true_label;
    std::string prompt = build_llm_prompt(a.title, a.body, cfg.labels);
    std::string key = cfg.model + ":" + hex64(fnv1a64(prompt));
    auto it = cache.find(key);
    if (it != cache.end()) {
      results[i].pred_label = it->second.label;
      results[i].raw_response = it->second.response;
      results[i].from_cache = true;
    } else {
      pending.push_back(i);
    }
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> auth_failed{false};
  std::string auth_error;
  std::mutex mu;  // guards cache inserts and auth_error

  auto worker = [&]() {
    httplib::Client client(url.base);
    client.set_connection_timeout(cfg.timeout_s, 0);
    client.set_read_timeout(cfg.timeout_s, 0);
    client.set_write_timeout(cfg.timeout_s, 0);
    httplib::Headers headers;
    if (!cfg.api_key.empty()) {
      headers.emplace("Authorization", "Bearer " + cfg.api_key);
    }

    auto ask_once = [&](const std::string& prompt, LlmPrediction& out) {
      json body = {
          {"model", cfg.model},
          {"messages", json::array({json{{"role", "user"},
                                         {"content", prompt}}})},
      };
      auto res = client.Post(url.path, headers, body.dump(),
                             "application/json");
      if (!res) {
        out.error = "request failed: " + httplib::to_string(res.error());
        return false;
      }
      if (res->status == 401 || res->status == 403) {
        std::lock_guard<std::mutex> lock(mu);
        if (!auth_failed.exchange(true)) {
          auth_error = "authentication failed (HTTP " +
                       std::to_string(res->status) + ")";
        }
        out.error = "authentication failed";
        return false;
      }
      if (res->status != 200) {
        out.error = "http status " + std::to_string(res->status);
        return false;
      }
      try {
        json j = json::parse(res->body);
        out.raw_response =
            j.at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const json::exception& e) {
        out.error = std::string("malformed response body: ") + e.what();
        return false;
      }
      out.error.clear();
      return true;
    };

    while (!auth_failed.load()) {
      std::size_t slot = next.fetch_add(1);
      if (slot >= pending.size()) break;
      std::size_t i = pending[slot];
      const auto& a = articles[i];
      LlmPrediction& out = results[i];
      std::string prompt = build_llm_prompt(a.title, a.body, cfg.labels);

      if (!ask_once(prompt, out)) continue;
      std::string label = parse_llm_label(out.raw_response, cfg.labels);
      if (label.empty()) {
        // one retry for an answer that did not match any label
        LlmPrediction second = out;
        if (ask_once(prompt, second)) {
          out.raw_response = second.raw_response;
          label = parse_llm_label(out.raw_response, cfg.labels);
        }
      }
      out.pred_label = label.empty() ? "unparseable" : label;

      std::lock_guard<std::mutex> lock(mu);
      cache[cfg.model + ":" + hex64(fnv1a64(prompt))] =
          CacheEntry{out.raw_response, out.pred_label};
    }
  };

  int n_workers = std::max(1, std::min<int>(cfg.workers,
                                            static_cast<int>(pending.size())));
  if (pending.empty()) n_workers = 0;
  std::vector<std::thread> threads;
  for (int w = 0; w < n_workers; ++w) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  save_cache(cfg.cache_path, cache);
  if (auth_failed.load()) throw UserError(auth_error);
  return results;
}

}  // namespace docbias
