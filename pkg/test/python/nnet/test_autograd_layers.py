from __future__ import annotations

from unittest import TestCase

import torch

from heritage.revive.exceptions import ConfigurationError, ShapeError
from heritage.revive.nnet import (
    DTYPE,
    ConvBlock,
    CrossAttentionLayer,
    FeaturePyramid,
    FeedForwardLayer,
    LatentDiscriminator,
    PatchDiscriminator,
    ResidualBlock,
    SelfAttentionLayer,
    UpBlock,
    backward,
    check_gradients,
    seeded,
    sine_positional_embedding,
)

SEEDS = (0, 1, 2)


def rand(*shape: int, seed: int) -> torch.Tensor:
    gen = torch.Generator().manual_seed(seed)
    return torch.randn(*shape, generator=gen, dtype=DTYPE).requires_grad_(True)


class TestBackward(TestCase):
    def test_quadratic(self):
        w = torch.tensor([1.0, 2.0, 3.0], dtype=DTYPE, requires_grad=True)
        backward((w * w).sum())
        assert torch.equal(w.grad, torch.tensor([2.0, 4.0, 6.0], dtype=DTYPE))

    def test_independent_parameter_has_zero_gradient(self):
        w = torch.ones(3, dtype=DTYPE, requires_grad=True)
        p = torch.ones(2, dtype=DTYPE, requires_grad=True)
        backward((w * w).sum() + 0.0 * p.sum())
        assert torch.equal(p.grad, torch.zeros(2, dtype=DTYPE))

    def test_accumulates(self):
        w = torch.tensor([1.0, 2.0], dtype=DTYPE, requires_grad=True)
        backward((w * w).sum())
        backward((w * w).sum())
        assert torch.equal(w.grad, torch.tensor([4.0, 8.0], dtype=DTYPE))

    def test_non_scalar_rejected(self):
        w = torch.ones(3, dtype=DTYPE, requires_grad=True)
        with self.assertRaises(ShapeError):
            backward(w * 2)


class TestLayerGradients(TestCase):
    def check(self, build, shape):
        for seed in SEEDS:
            with seeded(seed):
                layer = build()
            x = rand(*shape, seed=seed)
            assert check_gradients(layer, [x]), f"{type(layer).__name__} failed for seed {seed}"

    def test_conv_blocks(self):
        self.check(lambda: ConvBlock(2, 3), (1, 2, 8, 8))
        self.check(lambda: ConvBlock(2, 3, stride=2), (1, 2, 8, 8))
        self.check(lambda: UpBlock(2, 2), (1, 2, 4, 4))
        self.check(lambda: ResidualBlock(2, zero_init=False), (1, 2, 8, 8))

    def test_attention_layers(self):
        memory = rand(1, 16, 8, seed=9).detach()
        pos = sine_positional_embedding(4, 4, 8)
        for seed in SEEDS:
            with seeded(seed):
                cross = CrossAttentionLayer(8, 2)
                self_attn = SelfAttentionLayer(8, 2)
                mlp = FeedForwardLayer(8)
            queries = rand(1, 3, 8, seed=seed)
            assert check_gradients(lambda q, c=cross: c(q, memory, pos)[0], [queries])
            assert check_gradients(
                lambda m, c=cross, q=queries.detach(): c(q, m, pos)[0], [memory.clone().requires_grad_()]
            )
            assert check_gradients(lambda q, s=self_attn: s(q)[0], [queries])
            assert check_gradients(mlp, [queries])

    def test_discriminators(self):
        self.check(lambda: PatchDiscriminator(1, base_channels=4), (1, 1, 8, 8))
        self.check(lambda: LatentDiscriminator(3, hidden=8), (2, 3, 2, 2))

    def test_feature_pyramid(self):
        pyramid = FeaturePyramid(1, widths=(2, 3, 4), seed=5)
        x = rand(1, 1, 8, 8, seed=0)
        assert check_gradients(lambda t: tuple(pyramid(t)), [x])
        assert [f.shape[-1] for f in pyramid(x)] == [4, 2, 1]


class TestLayers(TestCase):
    def test_pyramid_is_fixed_and_seeded(self):
        first = FeaturePyramid(3, seed=7)
        second = FeaturePyramid(3, seed=7)
        for a, b in zip(first.parameters(), second.parameters()):
            assert torch.equal(a, b)
            assert not a.requires_grad

    def test_residual_block_starts_as_identity(self):
        x = rand(2, 4, 6, 6, seed=1).detach()
        assert torch.equal(ResidualBlock(4)(x), x)

    def test_uniform_keys_give_the_single_value(self):
        layer = CrossAttentionLayer(8, 2)
        token = rand(1, 1, 8, seed=3).detach()
        memory = token.expand(1, 10, 8)
        queries = rand(1, 4, 8, seed=4).detach()
        out, weights = layer.attend(queries, memory)
        expected = layer.attn.out_proj(torch.nn.functional.linear(
            token, layer.attn.in_proj_weight[16:], layer.attn.in_proj_bias[16:]
        ))
        assert torch.allclose(out, expected.expand_as(out), atol=1e-12)
        assert torch.allclose(weights, torch.full_like(weights, 0.1), atol=1e-12)

    def test_single_query_self_attention(self):
        layer = SelfAttentionLayer(8, 4)
        query = rand(1, 1, 8, seed=2).detach()
        out, weights = layer.attend(query)
        normed = layer.norm(query)
        value = torch.nn.functional.linear(normed, layer.attn.in_proj_weight[16:], layer.attn.in_proj_bias[16:])
        assert torch.allclose(out, layer.attn.out_proj(value), atol=1e-12)
        assert torch.allclose(weights, torch.ones_like(weights))

    def test_attention_rows_sum_to_one(self):
        layer = CrossAttentionLayer(8, 2)
        _, weights = layer(rand(3, 5, 8, seed=0).detach(), rand(3, 12, 8, seed=1).detach())
        assert weights.shape == (3, 2, 5, 12)
        assert torch.allclose(weights.sum(dim=-1), torch.ones(3, 2, 5, dtype=DTYPE), atol=1e-9)
        assert (weights >= 0).all()

    def test_attention_mask(self):
        layer = CrossAttentionLayer(8, 2)
        mask = torch.zeros(1, 2, 6, dtype=torch.bool)
        mask[0, 0, 3:] = True
        _, weights = layer(rand(1, 2, 8, seed=0).detach(), rand(1, 6, 8, seed=1).detach(), mask=mask)
        assert torch.all(weights[0, :, 0, 3:] == 0)
        assert torch.allclose(weights.sum(dim=-1), torch.ones(1, 2, 2, dtype=DTYPE), atol=1e-9)

    def test_heads_must_divide_dimension(self):
        with self.assertRaises(ConfigurationError):
            CrossAttentionLayer(10, 4)

    def test_positional_embedding(self):
        pos = sine_positional_embedding(3, 5, 8)
        assert pos.shape == (15, 8)
        assert pos.dtype == DTYPE
        assert len({tuple(row.tolist()) for row in pos}) == 15

    def test_discriminator_outputs(self):
        logits, features = PatchDiscriminator(1, base_channels=4)(torch.zeros(2, 1, 16, 16, dtype=DTYPE))
        assert logits.shape == (2, 1, 2, 2)
        assert len(features) == 3
