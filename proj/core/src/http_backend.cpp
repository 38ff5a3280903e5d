#include <httplib.h>

#include <chrono>
#include <semaphore>
#include <thread>

#include <spdlog/spdlog.h>

#include "eagers/backends.hpp"
#include "eagers/error.hpp"
#include "eagers/wire.hpp"

namespace eagers {
namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // optional path prefix, no trailing slash
};

Endpoint split_url(const std::string& url) {
  if (url.rfind("http://", 0) != 0) {
    throw Error(ErrorKind::kConfig, "base_url must start with http:// (got '" + url + "')");
  }
  const auto slash = url.find('/', 7);
  Endpoint ep{url.substr(0, slash), slash == std::string::npos ? "" : url.substr(slash)};
  while (!ep.prefix.empty() && ep.prefix.back() == '/') ep.prefix.pop_back();
  if (ep.origin.size() <= 7) throw Error(ErrorKind::kConfig, "base_url has no host");
  return ep;
}

}  // namespace

struct HttpBackend::Impl {
  BackendConfig config;
  Endpoint endpoint;
  std::counting_semaphore<> in_flight;

  explicit Impl(BackendConfig cfg)
      : config(std::move(cfg)), endpoint(split_url(config.base_url)), in_flight(config.max_in_flight) {}

  httplib::Client client() const {
    httplib::Client cli(endpoint.origin);
    const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::duration<double>(config.timeout_seconds));
    cli.set_connection_timeout(timeout);
    cli.set_read_timeout(timeout);
    cli.set_write_timeout(timeout);
    return cli;
  }

  // POSTs `body`; returns the 200 body and the wall-clock latency of the
  // successful attempt. Requests are idempotent, so retrying is safe.
  std::string post(const char* path, const std::string& body, double& latency) {
    const std::string target = endpoint.prefix + path;
    std::string last_error;
    for (int attempt = 0; attempt <= config.retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(100 << std::min(attempt - 1, 5)));
      }
      in_flight.acquire();
      const auto start = std::chrono::steady_clock::now();
      auto cli = client();
      auto res = cli.Post(target, body, "application/json");
      const auto stop = std::chrono::steady_clock::now();
      in_flight.release();

      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
        spdlog::warn("{} {} attempt {}: {}", endpoint.origin, target, attempt + 1, last_error);
        continue;
      }
      if (res->status == 200) {
        latency = std::chrono::duration<double>(stop - start).count();
        return res->body;
      }
      last_error = "HTTP " + std::to_string(res->status) + ": " + wire::parse_error(res->body);
      if (res->status >= 500) {
        spdlog::warn("{} {} attempt {}: {}", endpoint.origin, target, attempt + 1, last_error);
        continue;
      }
      throw Error(ErrorKind::kProtocol, target + " rejected the request: " + last_error);
    }
    throw Error(ErrorKind::kBackendUnavailable,
                target + " failed after " + std::to_string(config.retries + 1) + " attempts: " + last_error);
  }
};

HttpBackend::HttpBackend(BackendConfig config)
    : Backend(config.embedder_ids, config.model_id), impl_(nullptr) {
  config.validate();
  impl_ = std::make_unique<Impl>(std::move(config));
}

HttpBackend::~HttpBackend() = default;

bool HttpBackend::reachable() {
  auto cli = impl_->client();
  return static_cast<bool>(cli.Get(impl_->endpoint.prefix.empty() ? "/" : impl_->endpoint.prefix));
}

ExplainResponse HttpBackend::do_explain(const ExplainRequest& req) {
  ExplainResponse resp;
  const auto body = impl_->post(wire::kExplainPath, wire::explain_body(req, model_id()), resp.latency_seconds);
  resp.explanation = wire::parse_explain_response(body);
  return resp;
}

AnswerResponse HttpBackend::do_answer(const AnswerRequest& req) {
  AnswerResponse resp;
  const auto body = impl_->post(wire::kAnswerPath, wire::answer_body(req, model_id()), resp.latency_seconds);
  resp.answer = wire::parse_answer_response(body);
  return resp;
}

EmbedResponse HttpBackend::do_embed(const EmbedRequest& req) {
  EmbedResponse resp;
  const auto body = impl_->post(wire::kEmbedPath, wire::embed_body(req), resp.latency_seconds);
  resp.vectors = wire::parse_embed_response(body);
  return resp;
}

}  // namespace eagers
