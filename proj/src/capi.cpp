#include "carnot/carnot.h"

#include "carnot/serialization.hpp"
#include "carnot/service.hpp"

#include <cstring>
#include <new>

struct carnot_algebra {
  carnot::AlgebraPtr alg;
};

struct carnot_element {
  carnot::GroupElement x;
};

namespace {

thread_local std::string last_error;

carnot_status status_of(carnot::ErrorKind k) { return static_cast<carnot_status>(carnot::exit_code(k)); }

char* copy(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <class F>
carnot_status guarded(F&& f) {
  try {
    last_error.clear();
    f();
    return CARNOT_OK;
  } catch (const carnot::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    last_error = e.what();
    return CARNOT_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return CARNOT_ERR_INTERNAL;
  }
}

carnot_status null_arg(const char* what) {
  last_error = std::string("null argument: ") + what;
  return CARNOT_ERR_VALIDATION;
}

}  // namespace

extern "C" {

const char* carnot_version(void) { return "1.0.0"; }

const char* carnot_last_error(void) { return last_error.c_str(); }

void carnot_free_string(char* s) { std::free(s); }

carnot_status carnot_execute(const char* command, const char* request_json, char** response) {
  if (!command || !response) return null_arg("command/response");
  *response = nullptr;
  return guarded([&] { *response = copy(carnot::execute_command(command, request_json ? request_json : "")); });
}

carnot_status carnot_commands(char** names) {
  if (!names) return null_arg("names");
  return guarded([&] {
    std::string s;
    for (const auto& n : carnot::command_names()) s += n + "\n";
    *names = copy(s);
  });
}

carnot_status carnot_algebra_create(const char* id, carnot_algebra** out) {
  if (!id || !out) return null_arg("id/out");
  return guarded([&] { *out = new carnot_algebra{carnot::algebra_from_id(id)}; });
}

void carnot_algebra_free(carnot_algebra* alg) { delete alg; }

int carnot_algebra_dim(const carnot_algebra* alg) { return alg ? alg->alg->dim() : -1; }

int carnot_algebra_step(const carnot_algebra* alg) { return alg ? alg->alg->step() : -1; }

carnot_status carnot_element_identity(const carnot_algebra* alg, carnot_element** out) {
  if (!alg || !out) return null_arg("alg/out");
  return guarded([&] { *out = new carnot_element{carnot::GroupElement::identity(alg->alg)}; });
}

carnot_status carnot_element_from_json(const char* json, carnot_element** out) {
  if (!json || !out) return null_arg("json/out");
  return guarded([&] {
    carnot::Json j;
    try {
      j = carnot::Json::parse(json);
    } catch (const nlohmann::json::exception& e) {
      carnot::fail(carnot::ErrorKind::Parse, e.what());
    }
    *out = new carnot_element{carnot::element_from(j)};
  });
}

carnot_status carnot_element_to_json(const carnot_element* x, char** json) {
  if (!x || !json) return null_arg("x/json");
  return guarded([&] { *json = copy(carnot::element_json(x->x).dump()); });
}

carnot_status carnot_element_mul(const carnot_element* x, const carnot_element* y, carnot_element** out) {
  if (!x || !y || !out) return null_arg("x/y/out");
  return guarded([&] { *out = new carnot_element{carnot::mul(x->x, y->x)}; });
}

carnot_status carnot_element_inverse(const carnot_element* x, carnot_element** out) {
  if (!x || !out) return null_arg("x/out");
  return guarded([&] { *out = new carnot_element{carnot::inverse(x->x)}; });
}

carnot_status carnot_element_dilate(const char* lambda, const carnot_element* x, carnot_element** out) {
  if (!lambda || !x || !out) return null_arg("lambda/x/out");
  return guarded([&] { *out = new carnot_element{carnot::dilate(carnot::parse_rational(lambda), x->x)}; });
}

int carnot_element_equal(const carnot_element* x, const carnot_element* y) {
  if (!x || !y) return 0;
  return x->x == y->x ? 1 : 0;
}

void carnot_element_free(carnot_element* x) { delete x; }

}  // extern "C"
