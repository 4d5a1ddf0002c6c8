// Brick breaker: paddle follows taps, ball bounces, bricks award score.
var score = 0;
var lives = 3;
var playerPaddle = {x: 60, width: 24};
var ball = {x: 64, y: 40, vx: 3, vy: 2};
var bricks = [];
var level = 1;

function buildLevel(rows) {
  var out = [];
  var r = 0;
  while (r < rows) {
    var c = 0;
    while (c < 8) {
      out.push({x: c * 16 + 4, y: r * 8 + 6, hp: 1 + (r % 2)});
      c = c + 1;
    }
    r = r + 1;
  }
  return out;
}

function clampPaddle(x) {
  var half = playerPaddle.width / 2;
  if (x < half) { return half; }
  if (x > 128 - half) { return 128 - half; }
  return x;
}

function bounceWalls() {
  if (ball.x < 2 || ball.x > 126) { ball.vx = 0 - ball.vx; }
  if (ball.y < 2) { ball.vy = 0 - ball.vy; }
}

function hitBricks() {
  var i = 0;
  var gained = 0;
  while (i < bricks.length) {
    var b = bricks[i];
    var dx = ball.x - b.x;
    var dy = ball.y - b.y;
    if (dx * dx + dy * dy < 36) {
      b.hp = b.hp - 1;
      if (b.hp <= 0) {
        bricks.splice(i, 1);
        gained = gained + 10 * level;
        continue;
      }
    }
    i = i + 1;
  }
  return gained;
}

function stepBall(t) {
  ball.x = ball.x + ball.vx;
  ball.y = ball.y + ball.vy;
  bounceWalls();
  score = score + hitBricks();
  if (ball.y > 100) {
    var caught = Math.abs(ball.x - playerPaddle.x) < playerPaddle.width / 2 + 3;
    if (caught) {
      ball.vy = 0 - Math.abs(ball.vy);
      score = score + 1;
    } else {
      lives = lives - 1;
      ball.x = 64;
      ball.y = 40;
      ball.vy = 2;
    }
  }
  if (bricks.length === 0) {
    level = level + 1;
    bricks = buildLevel(2 + level);
    console.log("level up", level);
  }
}

function onTapPaddle(x, y) {
  playerPaddle.x = clampPaddle(x);
}

function tickBreakout(t) {
  stepBall(t);
  if (lives <= 0) {
    console.log("game over at", t, "score", score);
    lives = 3;
    score = Math.floor(score / 2);
  }
  commitState({score: score, lives: lives, level: level, bricks: bricks.length});
}

bricks = buildLevel(3);
registerTap(onTapPaddle);
registerTick(tickBreakout);
console.log("breakout ready");
