#include "fraggen/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "fraggen/molgraph.hpp"

namespace fraggen {

namespace {

int count_dummies(const std::string& fragment) {
  int n = 0;
  for (char c : fragment)
    if (c == '*') ++n;
  return n;
}

}  // namespace

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& corpus, int k) {
  if (k < 0) throw std::invalid_argument("LFM threshold k must be >= 0");
  if (corpus.empty()) throw std::invalid_argument("empty corpus");

  std::map<std::string, int64_t> freq;  // ordered: deterministic iteration
  for (const auto& seq : corpus)
    for (const auto& frag : seq) ++freq[frag];

  Vocabulary v;
  v.threshold_k_ = k;

  struct Entry {
    std::string token;
    int64_t freq;
    int attach;  // -2 = mask token (attachments in name)
  };
  std::map<std::string, Entry> entries;  // token -> entry
  for (const auto& [frag, f] : freq) {
    const int attach = count_dummies(frag);
    if (k > 0 && f < k) {
      const std::string mask = std::to_string(f) + "_" + std::to_string(attach);
      auto& e = entries[mask];
      if (e.token.empty()) e = {mask, 0, -2};
      e.freq += f;
      v.mask_groups_[mask].push_back(frag);
      v.fragment_to_mask_[frag] = mask;
    } else {
      entries[frag] = {frag, f, attach};
    }
  }
  for (auto& [mask, members] : v.mask_groups_) std::sort(members.begin(), members.end());

  // ids: specials first, then tokens by (frequency desc, token asc)
  std::vector<const Entry*> order;
  order.reserve(entries.size());
  for (const auto& [tok, e] : entries) order.push_back(&e);
  std::stable_sort(order.begin(), order.end(), [](const Entry* a, const Entry* b) {
    if (a->freq != b->freq) return a->freq > b->freq;
    return a->token < b->token;
  });

  const char* specials[] = {"<pad>", "<sos>", "<eos>"};
  for (const char* s : specials) {
    v.token_to_id_[s] = static_cast<int>(v.id_to_token_.size());
    v.id_to_token_.push_back(s);
    v.frequencies_.push_back(0);
    v.attachments_.push_back(-1);
    v.mask_attachments_.push_back(-1);
  }
  for (const Entry* e : order) {
    v.token_to_id_[e->token] = static_cast<int>(v.id_to_token_.size());
    v.id_to_token_.push_back(e->token);
    v.frequencies_.push_back(e->freq);
    if (e->attach == -2) {
      const auto us = e->token.find('_');
      v.mask_attachments_.push_back(std::stoi(e->token.substr(us + 1)));
      v.attachments_.push_back(v.mask_attachments_.back());
    } else {
      v.mask_attachments_.push_back(-1);
      v.attachments_.push_back(e->attach);
    }
  }
  return v;
}

int Vocabulary::id(const std::string& token) const {
  auto it = token_to_id_.find(token);
  if (it == token_to_id_.end()) throw OovError(token);
  return it->second;
}

bool Vocabulary::contains(const std::string& token) const {
  return token_to_id_.count(token) > 0;
}

const std::string& Vocabulary::token_for_fragment(const std::string& fragment) const {
  auto it = token_to_id_.find(fragment);
  if (it != token_to_id_.end() && mask_attachments_[it->second] < 0)
    return id_to_token_[it->second];
  auto mk = fragment_to_mask_.find(fragment);
  if (mk != fragment_to_mask_.end()) return mk->second;
  throw OovError(fragment);
}

std::vector<int> Vocabulary::encode(const std::vector<std::string>& fragments) const {
  std::vector<int> ids;
  ids.reserve(fragments.size() + 2);
  ids.push_back(kSosId);
  for (const auto& f : fragments) ids.push_back(id(token_for_fragment(f)));
  ids.push_back(kEosId);
  return ids;
}

std::vector<std::string> Vocabulary::decode(const std::vector<int>& ids) const {
  std::vector<std::string> out;
  for (int i : ids) {
    if (is_special(i)) continue;
    out.push_back(token(i));
  }
  return out;
}

int Vocabulary::attachments(int id) const { return attachments_.at(id); }

std::string Vocabulary::unmask(const std::string& mask_token, Rng& rng) const {
  auto it = mask_groups_.find(mask_token);
  if (it == mask_groups_.end())
    throw std::invalid_argument("not a mask token: " + mask_token);
  const auto& members = it->second;
  return members[rng.bounded(members.size())];
}

std::string Vocabulary::serialize() const {
  std::ostringstream out;
  out << "fraggen-vocab v1 k=" << threshold_k_ << "\n";
  for (int i = 0; i < size(); ++i)
    out << "TOKEN " << i << " " << id_to_token_[i] << " " << frequencies_[i] << "\n";
  for (const auto& [mask, members] : mask_groups_) {
    out << "GROUP " << mask;
    for (const auto& m : members) out << " " << m;
    out << "\n";
  }
  return out.str();
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write vocabulary file: " + path);
  f << serialize();
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read vocabulary file: " + path);
  std::string header;
  std::getline(f, header);
  Vocabulary v;
  if (header.rfind("fraggen-vocab v1 k=", 0) != 0)
    throw std::runtime_error("bad vocabulary header: " + header);
  v.threshold_k_ = std::stoi(header.substr(19));
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string kind;
    ss >> kind;
    if (kind == "TOKEN") {
      int id;
      std::string tok;
      int64_t freq;
      ss >> id >> tok >> freq;
      if (id != static_cast<int>(v.id_to_token_.size()))
        throw std::runtime_error("non-contiguous token ids in vocabulary file");
      v.token_to_id_[tok] = id;
      v.id_to_token_.push_back(tok);
      v.frequencies_.push_back(freq);
      // mask tokens look like "<freq>_<attach>"
      const auto us = tok.find('_');
      bool mask = us != std::string::npos && id >= 3;
      if (mask) {
        for (char c : tok)
          if (!std::isdigit(static_cast<unsigned char>(c)) && c != '_') mask = false;
      }
      if (mask) {
        v.mask_attachments_.push_back(std::stoi(tok.substr(us + 1)));
        v.attachments_.push_back(v.mask_attachments_.back());
      } else {
        v.mask_attachments_.push_back(-1);
        v.attachments_.push_back(id < 3 ? -1 : count_dummies(tok));
      }
    } else if (kind == "GROUP") {
      std::string mask, member;
      ss >> mask;
      auto& g = v.mask_groups_[mask];
      while (ss >> member) {
        g.push_back(member);
        v.fragment_to_mask_[member] = mask;
      }
    } else {
      throw std::runtime_error("bad vocabulary line: " + line);
    }
  }
  return v;
}

uint64_t Vocabulary::content_hash() const {
  uint64_t h = 1469598103934665603ULL;
  for (char c : serialize()) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace fraggen
