"""VQVAE: quantizer semantics, loss terms, gradients, training smoke."""

import numpy as np
import pytest
import torch

from graspgen.models import (
    VQVAE,
    VQVAESpec,
    VectorQuantizer,
    codebook_usage,
    quantize,
    train_vqvae,
    vqvae_loss,
)
from graspgen.errors import InvalidConfigError


def brute_force_indices(z_e, codebook):
    """Independent nearest-row search with explicit smallest-index ties."""
    b, d, h, w = z_e.shape
    flat = z_e.permute(0, 2, 3, 1).reshape(-1, d)
    out = []
    for v in flat:
        dists = ((v[None, :] - codebook) ** 2).sum(dim=1)
        best = min(range(len(codebook)), key=lambda j: (float(dists[j]), j))
        out.append(best)
    return torch.tensor(out, dtype=torch.long).reshape(b, h, w)


class TestQuantize:
    def test_snaps_to_nearest(self):
        codebook = torch.tensor([[0.0, 0.0], [1.0, 1.0]])
        z_e = torch.tensor([0.1, 0.2]).reshape(1, 2, 1, 1)
        z_q, idx = quantize(z_e, codebook)
        assert idx.item() == 0
        torch.testing.assert_close(z_q.flatten(), codebook[0])

    def test_exact_tie_takes_smallest_index(self):
        # Rows 1 and 3 are bitwise identical; a latent equal to that row is
        # equidistant by identical float arithmetic, so index 1 must win.
        codebook = torch.tensor([[5.0, 5.0], [2.0, -1.0], [9.0, 9.0], [2.0, -1.0]])
        z_e = torch.tensor([2.0, -1.0]).reshape(1, 2, 1, 1)
        _, idx = quantize(z_e, codebook)
        assert idx.item() == 1

    def test_midpoint_tie_takes_smallest_index(self):
        codebook = torch.tensor([[1.0, 0.0], [-1.0, 0.0]])
        z_e = torch.zeros(1, 2, 1, 1)
        _, idx = quantize(z_e, codebook)
        assert idx.item() == 0

    def test_matches_brute_force(self, rng):
        torch.manual_seed(0)
        codebook = torch.rand(512, 8) * 2 - 1
        z_e = torch.randn(2, 8, 5, 7)
        z_q, idx = quantize(z_e, codebook)
        torch.testing.assert_close(idx, brute_force_indices(z_e, codebook))
        # Outputs copy codebook rows exactly.
        flat_q = z_q.permute(0, 2, 3, 1).reshape(-1, 8)
        flat_i = idx.reshape(-1)
        assert (flat_q == codebook[flat_i]).all()

    def test_idempotent(self):
        torch.manual_seed(1)
        codebook = torch.rand(64, 16) * 2 - 1
        z_e = torch.randn(1, 16, 6, 6)
        z_q, idx = quantize(z_e, codebook)
        z_q2, idx2 = quantize(z_q, codebook)
        assert torch.equal(z_q2, z_q)
        assert torch.equal(idx2, idx)

    def test_empty_codebook_raises(self):
        with pytest.raises(InvalidConfigError):
            quantize(torch.randn(1, 4, 2, 2), torch.zeros(0, 4))

    def test_dim_mismatch_raises(self):
        with pytest.raises(InvalidConfigError):
            quantize(torch.randn(1, 4, 2, 2), torch.zeros(8, 5))


class TestStraightThrough:
    def test_gradient_passes_to_encoder_latent(self):
        vq = VectorQuantizer(32, 8, seed=0)
        z_e = torch.randn(1, 8, 3, 3, requires_grad=True)
        z_q_st, z_q, _ = vq(z_e)
        weights = torch.randn_like(z_q_st)
        (z_q_st * weights).sum().backward()
        torch.testing.assert_close(z_e.grad, weights)

    def test_forward_value_is_quantized(self):
        # z_e + (z_q - z_e).detach() reproduces z_q up to one float rounding
        # step (the cancellation is exact only in real arithmetic).
        vq = VectorQuantizer(32, 8, seed=0)
        z_e = torch.randn(2, 8, 4, 4)
        z_q_st, z_q, _ = vq(z_e)
        torch.testing.assert_close(z_q_st.detach(), z_q, atol=1e-6, rtol=1e-6)

    def test_codebook_untouched_by_straight_through(self):
        vq = VectorQuantizer(32, 8, seed=0)
        z_e = torch.randn(1, 8, 3, 3, requires_grad=True)
        z_q_st, _, _ = vq(z_e)
        z_q_st.sum().backward()
        assert vq.embedding.weight.grad is None or not vq.embedding.weight.grad.any()


class TestLoss:
    def test_zero_at_fixed_point(self):
        x = torch.randn(2, 3, 8, 8)
        z = torch.randn(2, 4, 2, 2)
        assert float(vqvae_loss(x, x.clone(), z, z.clone(), 0.25)) == 0.0

    def test_reconstruction_term(self):
        x = torch.zeros(1, 3, 4, 4)
        z = torch.zeros(1, 4, 1, 1)
        loss = vqvae_loss(x, x + 0.5, z, z, 0.25)
        assert float(loss) == pytest.approx(0.25)  # mse of constant 0.5

    def test_beta_weighting(self):
        x = torch.zeros(1, 3, 4, 4)
        z_e = torch.zeros(1, 4, 1, 1)
        z_q = z_e + 2.0
        # codebook term mse 4 + beta * commitment mse 4
        assert float(vqvae_loss(x, x, z_e, z_q, 0.25)) == pytest.approx(4.0 + 0.25 * 4.0)

    def test_commitment_gradient_matches_finite_differences(self):
        torch.manual_seed(0)
        codebook = (torch.rand(16, 4, dtype=torch.float64) * 4 - 2) * 10
        z_e = torch.randn(1, 4, 3, 3, dtype=torch.float64, requires_grad=True)
        z_q, _ = quantize(z_e.detach(), codebook)
        beta = 0.25
        loss = beta * torch.nn.functional.mse_loss(z_e, z_q)
        loss.backward()
        eps = 1e-6
        for index in [(0, 0, 0, 0), (0, 3, 2, 1), (0, 1, 1, 2)]:
            plus = z_e.detach().clone()
            plus[index] += eps
            minus = z_e.detach().clone()
            minus[index] -= eps
            fd = (
                float(beta * torch.nn.functional.mse_loss(plus, z_q))
                - float(beta * torch.nn.functional.mse_loss(minus, z_q))
            ) / (2 * eps)
            assert float(z_e.grad[index]) == pytest.approx(fd, rel=1e-3, abs=1e-12)


class TestModel:
    def test_codebook_init_bounds_and_determinism(self):
        spec = VQVAESpec()
        a = VQVAE(spec, seed=0)
        b = VQVAE(spec, seed=0)
        book = a.quantizer.codebook.detach()
        bound = 1.0 / spec.num_embeddings
        assert book.abs().max() <= bound
        assert book.std() > 0
        assert torch.equal(book, b.quantizer.codebook.detach())

    def test_latent_geometry(self):
        model = VQVAE(seed=0).eval()
        x = torch.randn(2, 3, 224, 224)
        with torch.no_grad():
            z_e = model.encode(x)
        assert z_e.shape == (2, 64, 56, 56)

    def test_zero_input_zero_latent(self):
        model = VQVAE(seed=0).eval()
        with torch.no_grad():
            z_e = model.encode(torch.zeros(1, 3, 32, 32))
        assert not z_e.any()  # He init zeroes every bias

    def test_forward_shapes(self):
        model = VQVAE(seed=0).eval()
        x = torch.randn(2, 3, 64, 64)
        with torch.no_grad():
            out = model(x)
        assert out.recon.shape == x.shape
        assert out.indices.shape == (2, 16, 16)
        assert out.z_e.shape == (2, 64, 16, 16)

    def test_channel_mismatch_raises(self):
        model = VQVAE(seed=0)
        with pytest.raises(InvalidConfigError):
            model.encode(torch.randn(1, 4, 32, 32))


class TestCodebookUsage:
    def test_concentrated_is_collapse(self):
        indices = np.zeros((4, 8, 8), dtype=np.int64)
        counts, collapsed = codebook_usage(indices, 512)
        assert collapsed
        assert counts[0] == 4 * 8 * 8

    def test_uniform_is_healthy(self):
        indices = np.arange(512).reshape(1, 16, 32)
        counts, collapsed = codebook_usage(indices, 512)
        assert not collapsed
        assert (counts == 1).all()


@pytest.fixture(scope="module")
def pool():
    rng = np.random.default_rng(0)
    images = []
    for i in range(12):
        base = np.zeros((3, 16, 16), dtype=np.float32)
        base[:, :, : 8 + (i % 5)] = 0.8
        base += rng.normal(0, 0.05, size=base.shape).astype(np.float32)
        images.append(base)
    return images


class TestTraining:
    @pytest.mark.slow
    def test_loss_decreases_and_reconstruction_improves(self, pool):
        spec = VQVAESpec(num_embeddings=32, embedding_dim=16, hidden=(16, 32))
        model, history = train_vqvae(pool, spec, seed=0, epochs=40, batch_size=4)
        assert history["loss"][-1] < history["loss"][0]
        data = torch.as_tensor(np.stack(pool))
        fresh = VQVAE(spec, seed=0).eval()
        with torch.no_grad():
            before = float(torch.nn.functional.mse_loss(fresh(data).recon, data))
            after = float(torch.nn.functional.mse_loss(model(data).recon, data))
        assert after < 0.5 * before
        assert len(history["usage"]) == spec.num_embeddings
        assert isinstance(history["collapsed"], bool)

    @pytest.mark.slow
    def test_training_deterministic(self, pool):
        spec = VQVAESpec(num_embeddings=16, embedding_dim=8, hidden=(8, 16))
        _, h1 = train_vqvae(pool, spec, seed=3, epochs=3, batch_size=4)
        _, h2 = train_vqvae(pool, spec, seed=3, epochs=3, batch_size=4)
        assert h1["loss"] == h2["loss"]

    def test_empty_pool_raises(self):
        with pytest.raises(InvalidConfigError):
            train_vqvae([], epochs=1)
