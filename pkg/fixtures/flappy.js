// Flap physics with scrolling pipe gaps and a coin bonus lane.
var birdY = 50;
var birdV = 0;
var gravity = 0.6;
var pipes = [];
var coinRow = [];
var score = 0;
var best = 0;
var alive = true;

function makePipe(offset) {
  return {x: 130 + offset, gap: 28 + Math.floor(Math.random() * 20)};
}

function flapUp(x, y) {
  birdV = -4.5;
  if (!alive) {
    alive = true;
    birdY = 50;
    birdV = 0;
  }
}

function collide(pipe) {
  if (pipe.x > 18 && pipe.x < 30) {
    var top = pipe.gap - 12;
    var bottom = pipe.gap + 12;
    if (birdY < top || birdY > bottom) { return true; }
  }
  return false;
}

function scrollPipes() {
  var i = 0;
  while (i < pipes.length) {
    var p = pipes[i];
    p.x = p.x - 2;
    if (collide(p)) {
      alive = false;
      if (score > best) { best = score; }
      score = 0;
    }
    if (p.x < -8) {
      pipes.splice(i, 1);
      score = score + 1;
      continue;
    }
    i = i + 1;
  }
  if (pipes.length < 3) {
    pipes.push(makePipe(pipes.length * 45));
  }
}

function collectCoins(t) {
  if (t % 24 === 0) {
    coinRow.push({x: 128, y: 30 + (t % 40)});
  }
  var j = 0;
  var gained = 0;
  while (j < coinRow.length) {
    var c = coinRow[j];
    c.x = c.x - 3;
    var near = Math.abs(c.x - 24) < 5 && Math.abs(c.y - birdY) < 7;
    if (near) {
      gained = gained + 3;
      coinRow.splice(j, 1);
      continue;
    }
    if (c.x < -4) {
      coinRow.splice(j, 1);
      continue;
    }
    j = j + 1;
  }
  return gained;
}

function tickFlappy(t) {
  if (alive) {
    birdV = birdV + gravity;
    birdY = birdY + birdV;
    if (birdY > 100) { birdY = 100; birdV = 0; alive = false; }
    if (birdY < 0) { birdY = 0; birdV = 0.5; }
    scrollPipes();
    score = score + collectCoins(t);
  }
  commitState({y: Math.floor(birdY), score: score, best: best, alive: alive});
}

registerTap(flapUp);
registerTick(tickFlappy);
console.log("flappy takes off");
