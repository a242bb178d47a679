#include "gatechain/node.hpp"

#include "gatechain/error.hpp"

namespace gatechain {

Node::Node(NodePaths paths, store::KeyStore keystore, store::ChainStore chain_store,
           std::unique_ptr<registry::Registry> registry)
    : paths_(std::move(paths)),
      keystore_(std::move(keystore)),
      chain_store_(std::move(chain_store)),
      registry_(std::move(registry)),
      admin_key_(keystore_.admin_key()) {
  wire();
}

void Node::wire() {
  registry_->set_sinks({
      [this](const chain::Block& block) { chain_store_.append_block_line(block); },
      [this](const authority::AuthorityRegistry& authorities) {
        std::lock_guard lock(keystore_mutex_);
        auto next = keystore_;
        next.set_authorities(authorities);
        next.save(paths_.keystore);
        keystore_ = std::move(next);
      },
  });
}

std::unique_ptr<Node> Node::init(const NodePaths& paths, std::string admin_name, registry::Options options) {
  for (const auto& p : {paths.chain, paths.keystore}) {
    if (std::filesystem::exists(p)) throw Error(Errc::already_exists, p.string() + " already exists");
  }
  const auto admin = crypto::KeyPair::generate();
  auto reg = registry::Registry::create(admin, std::move(admin_name), crypto::DataKey::generate(), options);

  store::KeyStore keystore(reg->data_key(), reg->authorities(), admin.public_key());
  keystore.host(admin);
  auto chain_store = store::ChainStore::create(paths.chain);
  try {
    keystore.save(paths.keystore);
    for (const auto& b : reg->blocks()) chain_store.append_block_line(b);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(paths.chain, ec);
    std::filesystem::remove(paths.keystore, ec);
    throw;
  }
  return std::unique_ptr<Node>(new Node(paths, std::move(keystore), std::move(chain_store), std::move(reg)));
}

std::unique_ptr<Node> Node::open(const NodePaths& paths, std::vector<std::string>& warnings, registry::Options options) {
  if (!std::filesystem::exists(paths.keystore)) throw Error(Errc::io, "key store not found: " + paths.keystore.string());
  if (!std::filesystem::exists(paths.chain)) throw Error(Errc::io, "chain file not found: " + paths.chain.string());
  auto keystore = store::KeyStore::load(paths.keystore);
  store::LoadResult loaded;
  auto chain_store = store::ChainStore::open(paths.chain, loaded);
  warnings.insert(warnings.end(), loaded.warnings.begin(), loaded.warnings.end());
  auto reg = std::make_unique<registry::Registry>(chain::Chain(std::move(loaded.blocks)), keystore.authorities(),
                                                  keystore.data_key(), options);
  return std::unique_ptr<Node>(new Node(paths, std::move(keystore), std::move(chain_store), std::move(reg)));
}

crypto::KeyPair Node::identity(std::string_view public_key) const {
  std::lock_guard lock(keystore_mutex_);
  return keystore_.identity(public_key);
}

bool Node::hosts(std::string_view public_key) const {
  std::lock_guard lock(keystore_mutex_);
  return keystore_.hosts(public_key);
}

authority::AuthorityRecord Node::add_hosted_authority(std::string_view actor_key, const crypto::KeyPair& key,
                                                      std::string display_name, authority::Role role) {
  auto record = registry_->add_authority(actor_key, key.public_key(), std::move(display_name), role);
  std::lock_guard lock(keystore_mutex_);
  auto next = keystore_;
  next.host(key);
  next.save(paths_.keystore);
  keystore_ = std::move(next);
  return record;
}

}  // namespace gatechain
